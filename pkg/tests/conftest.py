import pytest

from concur.state import PureState, ghz_state, w_state

_ACCEPTANCE_LINES = []


@pytest.fixture
def ghz3():
    return ghz_state(3)


@pytest.fixture
def w3():
    return w_state(3)


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def brute_contribution(state: PureState, active):
    """Class contribution straight from the definition, no shared helpers."""
    import itertools

    a = state.tensor()
    act = [j - 1 for j in sorted(active)]
    s = len(act)
    axes = []
    for j, d in enumerate(state.dims):
        axes.append(list(itertools.combinations(range(d), 2)) if j in act else [(t, t) for t in range(d)])
    total = 0.0
    for block in itertools.product(*axes):
        prods = {}
        for bits in itertools.product((0, 1), repeat=s):
            if bits[0] == 1:
                continue
            idx_u, idx_v = [], []
            for j, (k, l) in enumerate(block):
                if j in act:
                    b = bits[act.index(j)]
                    idx_u.append((k, l)[b])
                    idx_v.append((k, l)[1 - b])
                else:
                    idx_u.append(k)
                    idx_v.append(k)
            prods[bits] = a[tuple(idx_u)] * a[tuple(idx_v)]
        vals = list(prods.values())
        # sum_{i<j} |p_i - p_j|^2 = n sum |p|^2 - |sum p|^2
        n = len(vals)
        total += n * sum(abs(p) ** 2 for p in vals) - abs(sum(vals)) ** 2
    return total
