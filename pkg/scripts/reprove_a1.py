"""Re-derive that A1 = K3 + (K3 u K2) is a torus obstruction.

A1 itself must not embed on the torus while every single-edge deletion
must.  Each positive case prints the face count of its verified certificate.
"""

import time

from permuta.graphs import Complete, Join, Union, build
from permuta.topology import embeddable_on, verify_certificate


def main():
    a1 = build(Join(Complete(3), Union(Complete(3), Complete(2))))
    t0 = time.time()
    whole = embeddable_on(a1, "torus", use_cache=False)
    print(f"A1: {a1.n} vertices, {a1.m} edges, toroidal={whole is not None} ({time.time() - t0:.2f}s)")
    ok = whole is None
    for u, v in a1.edges():
        h = a1.remove_edge(u, v)
        cert = embeddable_on(h, "torus", use_cache=False)
        good = cert is not None and verify_certificate(h, cert)
        ok &= good
        print(f"  A1 - {u}{v}: {'embeds, ' + str(cert.faces) + ' faces' if good else 'FAILS'}")
    print("A1 is a torus obstruction" if ok else "A1 is NOT a minimal obstruction")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
