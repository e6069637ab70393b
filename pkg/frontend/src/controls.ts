/** Session control state. The server is authoritative: intents only build
 *  messages, and the displayed running/speed state changes exclusively when
 *  a hello or control frame arrives. */

import type { ControlFrame, ControlMessage, HelloFrame } from "./protocol.js";

export interface SessionState {
  running: boolean;
  speed: number;
}

export class SessionControls {
  private current: SessionState | null = null;

  get state(): SessionState | null {
    return this.current === null ? null : { ...this.current };
  }

  seedFromHello(hello: HelloFrame): void {
    this.current = { running: hello.running, speed: hello.speed };
  }

  applyControlFrame(frame: ControlFrame): SessionState {
    this.current = { running: frame.running, speed: frame.speed };
    return { ...this.current };
  }

  intentPause(): ControlMessage {
    return { type: "control", action: "pause" };
  }

  intentResume(): ControlMessage {
    return { type: "control", action: "resume" };
  }

  intentStep(): ControlMessage {
    return { type: "control", action: "step" };
  }

  intentSpeed(factor: number): ControlMessage {
    if (!(factor > 0) || !Number.isFinite(factor)) {
      throw new Error(`speed factor must be positive, got ${factor}`);
    }
    return { type: "control", action: "speed", factor };
  }
}
