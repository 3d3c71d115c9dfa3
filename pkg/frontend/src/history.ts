// Prompt history: parameters only, never pixels, so memory stays bounded.

export interface HistoryEntry {
  kind: "text" | "visual" | "interpolated";
  prompt: string;
  threshold: number;
  recipe: string;
  a: number | null;
}

export class PromptHistory {
  private readonly entries: HistoryEntry[] = [];

  constructor(private readonly capacity = 100) {}

  push(entry: HistoryEntry): void {
    const last = this.entries[this.entries.length - 1];
    if (last && sameEntry(last, entry)) return; // collapse immediate repeats
    this.entries.push({ ...entry });
    if (this.entries.length > this.capacity) this.entries.shift();
  }

  get(index: number): HistoryEntry {
    const e = this.entries[index];
    if (!e) throw new Error(`no history entry ${index}`);
    return { ...e };
  }

  list(): HistoryEntry[] {
    return this.entries.map((e) => ({ ...e }));
  }

  get length(): number {
    return this.entries.length;
  }
}

function sameEntry(a: HistoryEntry, b: HistoryEntry): boolean {
  return (
    a.kind === b.kind &&
    a.prompt === b.prompt &&
    a.threshold === b.threshold &&
    a.recipe === b.recipe &&
    a.a === b.a
  );
}
