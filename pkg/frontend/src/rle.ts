// Wire masks are flat integer arrays: [width, height, runCount, runs...],
// runs alternating background-then-foreground starting with background
// (the first run may be zero).

export interface BinaryMask {
  width: number;
  height: number;
  data: Uint8Array; // row-major 0/1
}

export function decodeWireMask(arr: number[]): BinaryMask {
  if (arr.length < 3) {
    throw new Error(`wire mask too short (${arr.length} fields)`);
  }
  const [width, height, runCount] = arr;
  const runs = arr.slice(3);
  if (runs.length !== runCount) {
    throw new Error(`declared ${runCount} runs, got ${runs.length}`);
  }
  const total = width * height;
  const data = new Uint8Array(total);
  let pos = 0;
  let fg = false;
  for (let i = 0; i < runs.length; i++) {
    const run = runs[i];
    if (run < 0 || !Number.isInteger(run)) {
      throw new Error(`bad run at index ${i}`);
    }
    if (run === 0 && i !== 0) {
      throw new Error(`zero-length run at index ${i}`);
    }
    if (fg) {
      data.fill(1, pos, pos + run);
    }
    pos += run;
    fg = !fg;
  }
  if (pos !== total) {
    throw new Error(`runs sum to ${pos}, expected ${total}`);
  }
  return { width, height, data };
}

export function encodeWireMask(mask: BinaryMask): number[] {
  const runs: number[] = [];
  let current = 0;
  let run = 0;
  for (const v of mask.data) {
    const bit = v ? 1 : 0;
    if (bit === current) {
      run += 1;
    } else {
      runs.push(run);
      current = bit;
      run = 1;
    }
  }
  runs.push(run);
  return [mask.width, mask.height, runs.length, ...runs];
}

export function maskArea(mask: BinaryMask): number {
  let n = 0;
  for (const v of mask.data) n += v;
  return n;
}
