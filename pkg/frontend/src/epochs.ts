/** Evolution-epoch grouping of the interval axis.
 *
 * The grid editor shows one column per epoch by default (edits are epoch-wise
 * in practice) and expands an epoch to per-interval columns on demand.
 */

export interface Epoch {
  index: number;
  start: number; // 1-based inclusive
  end: number; // 1-based inclusive
}

export function epochsOf(evolution: number[]): Epoch[] {
  const horizon = evolution.length;
  const starts = [1];
  for (let t = 2; t <= horizon; t += 1) {
    if (evolution[t - 1] === 1) starts.push(t);
  }
  return starts.map((start, k) => ({
    index: k,
    start,
    end: k + 1 < starts.length ? starts[k + 1] - 1 : horizon,
  }));
}

export interface AxisColumn {
  kind: 'epoch' | 'interval';
  epoch: number;
  start: number;
  end: number;
  label: string;
}

/** Columns of the grid: collapsed epochs, or intervals for expanded ones. */
export function axisColumns(evolution: number[], expanded: Set<number>): AxisColumn[] {
  const columns: AxisColumn[] = [];
  for (const epoch of epochsOf(evolution)) {
    if (expanded.has(epoch.index)) {
      for (let t = epoch.start; t <= epoch.end; t += 1) {
        columns.push({ kind: 'interval', epoch: epoch.index, start: t, end: t, label: `t${t}` });
      }
    } else {
      columns.push({
        kind: 'epoch',
        epoch: epoch.index,
        start: epoch.start,
        end: epoch.end,
        label: `e${epoch.index + 1} (${epoch.start}-${epoch.end})`,
      });
    }
  }
  return columns;
}
