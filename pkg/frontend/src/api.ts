// Typed access to the two endpoints the console consumes: POST /chat and
// GET /scene.  The fetch function is injectable so tests can fake the wire.

export interface SceneObjectView {
  ref_name: string;
  prototype: string;
  center: { x: number; y: number; z: number };
  extents: { half_width_x: number; half_depth_z: number; height_y: number };
}

export interface SceneView {
  scene_version: number;
  floor: { width_x: number; depth_z: number };
  objects: SceneObjectView[];
}

export interface ChatReply {
  reply: string;
  scene_version: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async postChat(text: string): Promise<ChatReply> {
    const res = await this.fetchImpl(`${this.baseUrl}/chat`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
    if (!res.ok) {
      throw new ApiError(`chat failed (${res.status})`, res.status);
    }
    return (await res.json()) as ChatReply;
  }

  async getScene(): Promise<SceneView> {
    const res = await this.fetchImpl(`${this.baseUrl}/scene`, { method: 'GET' });
    if (!res.ok) {
      throw new ApiError(`scene fetch failed (${res.status})`, res.status);
    }
    return (await res.json()) as SceneView;
  }
}
