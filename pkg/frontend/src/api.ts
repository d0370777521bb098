import type { HealthResponse, ImportanceEntry, PredictResponse, SchemaEntry } from './types.js'

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(detail)
        this.name = 'ApiError'
    }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

/** Typed client for the scoring service; all numbers come back verbatim. */
export class ApiClient {
    constructor(
        readonly baseUrl: string,
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, init)
        if (!response.ok) {
            let detail = `${response.status}`
            try {
                const body = await response.json()
                if (body && typeof body.detail === 'string') detail = body.detail
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, detail)
        }
        return response.json() as Promise<T>
    }

    schema(): Promise<SchemaEntry[]> {
        return this.request<SchemaEntry[]>('/schema')
    }

    importance(): Promise<ImportanceEntry[]> {
        return this.request<ImportanceEntry[]>('/importance')
    }

    health(): Promise<HealthResponse> {
        return this.request<HealthResponse>('/health')
    }

    predict(values: Record<string, number>, signal?: AbortSignal): Promise<PredictResponse> {
        return this.request<PredictResponse>('/predict', {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(values),
            signal,
        })
    }
}

/** At most one in-flight prediction: beginning a submit aborts the previous one. */
export class LatestWins {
    private controller: AbortController | null = null

    begin(): AbortSignal {
        this.controller?.abort()
        this.controller = new AbortController()
        return this.controller.signal
    }
}

export function isAbort(error: unknown): boolean {
    return error instanceof DOMException && error.name === 'AbortError'
}
