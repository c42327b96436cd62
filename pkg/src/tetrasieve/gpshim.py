"""Minimal GP-script interpreter on top of cypari2.

Reads a GP script on standard input and evaluates it statement by
statement, so that it can stand in for ``gp -q`` when only the PARI
library is installed.  A statement ends at a newline once all braces are
closed.  Errors go to standard error with exit status 1.
"""

import sys


def statements(text: str):
    buf, depth = [], 0
    for line in text.splitlines():
        if not line.strip() and not buf:
            continue
        buf.append(line)
        depth += line.count("{") - line.count("}")
        if depth <= 0:
            yield "\n".join(buf)
            buf, depth = [], 0
    if buf:
        yield "\n".join(buf)


def main(argv=None) -> int:
    try:
        import cypari2
    except ImportError:
        print("gpshim: cypari2 is not installed", file=sys.stderr)
        return 2
    pari = cypari2.Pari()
    pari.allocatemem(10 ** 8, 4 * 10 ** 9, silent=True)
    script = sys.stdin.read()
    for stmt in statements(script):
        try:
            pari(stmt)
        except cypari2.PariError as exc:
            sys.stdout.flush()
            print("gpshim: error in statement %r: %s" % (stmt[:80], exc), file=sys.stderr)
            return 1
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
