/** Byte-bounded LRU cache keyed by node name. */

export class LruCache<V> {
    private entries = new Map<string, { value: V; bytes: number }>();
    private bytes = 0;

    constructor(readonly maxBytes: number,
                private onEvict?: (key: string, value: V) => void) {
        if (maxBytes <= 0) throw new Error('maxBytes must be > 0');
    }

    get sizeBytes(): number {
        return this.bytes;
    }

    get count(): number {
        return this.entries.size;
    }

    has(key: string): boolean {
        return this.entries.has(key);
    }

    /** Fetch and mark as most recently used. */
    get(key: string): V | undefined {
        const entry = this.entries.get(key);
        if (!entry) return undefined;
        this.entries.delete(key);
        this.entries.set(key, entry);
        return entry.value;
    }

    set(key: string, value: V, bytes: number): void {
        const old = this.entries.get(key);
        if (old) {
            this.entries.delete(key);
            this.bytes -= old.bytes;
        }
        this.entries.set(key, { value, bytes });
        this.bytes += bytes;
        // oldest entries first in Map iteration order
        for (const [k, e] of this.entries) {
            if (this.bytes <= this.maxBytes || this.entries.size <= 1) break;
            if (k === key) continue;
            this.entries.delete(k);
            this.bytes -= e.bytes;
            this.onEvict?.(k, e.value);
        }
    }

    clear(): void {
        this.entries.clear();
        this.bytes = 0;
    }
}
