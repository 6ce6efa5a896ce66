from dataclasses import dataclass, fields, replace


@dataclass
class OpCounter:
    '''
    Tally of scalar operations executed by the solver kernels. Every
    add/sub, mul, div, comparison (including abs and sign) counts 1, and so
    does every exp and log. Counters only ever grow during a run.

    Notes
    -----
    Kernels charge the counter with closed-form counts derived from the
    vector sizes they touch, so counting is deterministic and costs O(1)
    per kernel call.
    '''
    adds: int = 0
    muls: int = 0
    divs: int = 0
    exps: int = 0
    logs: int = 0
    compares: int = 0

    def count(self, adds: int = 0, muls: int = 0, divs: int = 0, exps: int = 0,
              logs: int = 0, compares: int = 0) -> "OpCounter":
        self.adds += adds
        self.muls += muls
        self.divs += divs
        self.exps += exps
        self.logs += logs
        self.compares += compares
        return self

    def merge(self, other: "OpCounter") -> "OpCounter":
        return self.count(**{f.name: getattr(other, f.name) for f in fields(other)})

    def total(self) -> int:
        return self.adds + self.muls + self.divs + self.exps + self.logs + self.compares

    def snapshot(self) -> "OpCounter":
        return replace(self)

    def as_dict(self) -> dict:
        return {**{f.name: getattr(self, f.name) for f in fields(self)}, 'total': self.total()}


def ensure_counter(counter: OpCounter = None) -> OpCounter:
    # Kernels called without a counter charge a throwaway one.
    return counter if counter is not None else OpCounter()


def count_softmax_rows(counter: OpCounter, rows: int, n: int):
    '''
    Cost of 'rows' max-shifted softmaxes over length-n logits (lambda - C_i)/eta:
    n subs + n divs for the logits, n-1 compares for the max, n subs for the
    shift, n exps, n-1 adds for the normalizer and n divs.
    '''
    counter.count(adds=rows * (3 * n - 1), divs=rows * 2 * n, compares=rows * (n - 1), exps=rows * n)


def count_logsumexp_rows(counter: OpCounter, rows: int, n: int):
    # Same as a softmax without the final normalization, plus the log and the shift back.
    counter.count(adds=rows * (3 * n), divs=rows * n, compares=rows * (n - 1), exps=rows * n, logs=rows)
