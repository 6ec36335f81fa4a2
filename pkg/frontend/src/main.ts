// Browser bootstrap: binds the controller to the chat panel DOM and the
// scene view to a canvas.

import { ApiClient } from './api.js';
import { ConsoleController } from './controller.js';
import { startScenePoll } from './poll.js';
import { renderScene, Surface } from './render.js';

class CanvasSurface implements Surface {
  constructor(private readonly ctx: CanvasRenderingContext2D) {}

  clear(width: number, height: number): void {
    this.ctx.clearRect(0, 0, width, height);
  }

  floorRect(x: number, y: number, w: number, h: number): void {
    this.ctx.fillStyle = '#f4f1ea';
    this.ctx.fillRect(x, y, w, h);
    this.ctx.strokeStyle = '#6b6b6b';
    this.ctx.lineWidth = 2;
    this.ctx.strokeRect(x, y, w, h);
  }

  gridLine(x1: number, y1: number, x2: number, y2: number): void {
    this.ctx.strokeStyle = '#d8d2c4';
    this.ctx.lineWidth = 1;
    this.ctx.beginPath();
    this.ctx.moveTo(x1, y1);
    this.ctx.lineTo(x2, y2);
    this.ctx.stroke();
  }

  objectRect(x: number, y: number, w: number, h: number): void {
    this.ctx.fillStyle = '#7aa6c2';
    this.ctx.fillRect(x, y, w, h);
    this.ctx.strokeStyle = '#2f5d7c';
    this.ctx.lineWidth = 1.5;
    this.ctx.strokeRect(x, y, w, h);
  }

  label(text: string, x: number, y: number): void {
    this.ctx.fillStyle = '#15324a';
    this.ctx.font = '12px system-ui, sans-serif';
    this.ctx.textAlign = 'center';
    this.ctx.fillText(text, x, y - 4);
  }
}

function appendTurn(log: HTMLElement, author: string, text: string): void {
  const row = document.createElement('div');
  row.className = `turn ${author}`;
  row.textContent = text;
  log.appendChild(row);
  log.scrollTop = log.scrollHeight;
}

function main(): void {
  const log = document.getElementById('chat-log') as HTMLElement;
  const input = document.getElementById('chat-input') as HTMLInputElement;
  const sendButton = document.getElementById('chat-send') as HTMLButtonElement;
  const retryRow = document.getElementById('retry-row') as HTMLElement;
  const retryButton = document.getElementById('chat-retry') as HTMLButtonElement;
  const versionBadge = document.getElementById('scene-version') as HTMLElement;
  const canvas = document.getElementById('scene-canvas') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('canvas 2d context unavailable');
  const surface = new CanvasSurface(ctx);

  const api = new ApiClient('');
  const controller = new ConsoleController(api);

  let renderedTurns = 0;
  controller.onChange(() => {
    for (; renderedTurns < controller.turns.length; renderedTurns++) {
      const turn = controller.turns[renderedTurns];
      appendTurn(log, turn.author, turn.text);
    }
    input.disabled = controller.inFlight;
    sendButton.disabled = controller.inFlight;
    retryRow.hidden = controller.pendingText === null;
    if (controller.view) {
      versionBadge.textContent = `v${controller.view.scene_version}`;
      renderScene(controller.view, surface, canvas.width, canvas.height);
    }
  });

  async function submit(): Promise<void> {
    const text = input.value;
    if (await controller.send(text)) {
      input.value = '';
      input.focus();
    }
  }

  sendButton.addEventListener('click', () => void submit());
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void submit();
  });
  retryButton.addEventListener('click', () => void controller.retry());

  void controller.refreshScene();
  startScenePoll(api, controller);
}

main();
