from zfee.core import PhysicalParams, db_to_linear, normalize

N0 = 10.0 ** -20.4

# criterion number -> (passed, detail); filled by test_acceptance, printed by conftest
ACCEPTANCE = {}


def physical(gc_db=-100.0, **kw):
    """Reference hardware: 200 kHz, 2 ms, alpha 2, 10 mW chains, 0.1 W fixed, 1 nJ/op."""
    base = dict(N0=N0, B=2e5, Tc=2e-3, Gc=float(db_to_linear(gc_db)), alpha=2.0,
                p_r=0.01, p_d=0.01, p_s=0.1, C0=1e-9)
    base.update(kw)
    return PhysicalParams(**base)


def theta(gc_db=-100.0, **kw):
    return normalize(physical(gc_db, **kw))
