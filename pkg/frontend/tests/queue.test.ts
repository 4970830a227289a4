import { describe, expect, it } from "vitest";

import { InputQueue } from "../src/queue.js";

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

describe("InputQueue", () => {
  it("sends immediately when idle", async () => {
    const sent: string[] = [];
    const queue = new InputQueue<string>(async (item) => {
      sent.push(item);
    });
    queue.enqueue("L");
    await queue.idle();
    expect(sent).toEqual(["L"]);
  });

  it("keeps a single request in flight and coalesces bursts", async () => {
    const sent: string[] = [];
    let release: (() => void) | null = null;
    const queue = new InputQueue<string>(async (item) => {
      sent.push(item);
      await new Promise<void>((resolve) => {
        release = resolve;
      });
    });
    queue.enqueue("L");
    await tick();
    expect(queue.inFlight).toBe(true);
    queue.enqueue("U");
    queue.enqueue("D");
    queue.enqueue("R"); // burst while busy: only the last survives
    release!();
    await tick();
    release!();
    await queue.idle();
    expect(sent).toEqual(["L", "R"]);
  });

  it("keeps draining after a send failure", async () => {
    const sent: string[] = [];
    let failed = false;
    const queue = new InputQueue<string>(async (item) => {
      sent.push(item);
      if (!failed) {
        failed = true;
        throw new Error("boom");
      }
    });
    queue.enqueue("L");
    await tick();
    queue.enqueue("R");
    await queue.idle();
    expect(sent).toEqual(["L", "R"]);
  });

  it("idle resolves once everything drained", async () => {
    const queue = new InputQueue<number>(async () => {
      await tick();
    });
    queue.enqueue(1);
    queue.enqueue(2);
    await queue.idle();
    expect(queue.inFlight).toBe(false);
  });
});
