import { ApiClient } from './api.js'
import { App } from './app.js'

function serviceBaseUrl(): string {
    const params = new URLSearchParams(window.location.search)
    return params.get('api') ?? 'http://127.0.0.1:8000'
}

function mount(): void {
    const el = {
        form: document.getElementById('form') as HTMLElement,
        risk: document.getElementById('risk') as HTMLElement,
        importance: document.getElementById('importance') as HTMLElement,
        banner: document.getElementById('banner') as HTMLElement,
        submit: document.getElementById('submit') as HTMLButtonElement,
    }
    const app = new App(new ApiClient(serviceBaseUrl()), el)
    void app.start()
}

mount()
