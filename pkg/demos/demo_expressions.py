"""Tour of the expression layer: parse, print, evaluate, differentiate."""
import argparse

from fracvar import differentiate, evaluate, free_vars, parse, simplify, to_string


EXAMPLES = [
    "(v - 1)^2",
    "sin(x)*u + v/2",
    "exp(u/2) - log(x + 1)",
    "-x^2",
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("expr", nargs="?", help="expression to inspect (default: a tour)")
    ap.add_argument("--at", default="x=0.5,u=1.0,v=2.0",
                    help="comma-separated bindings, e.g. x=1,v=3")
    args = ap.parse_args()

    env = {}
    for part in args.at.split(","):
        name, _, val = part.partition("=")
        env[name.strip()] = float(val)

    sources = [args.expr] if args.expr else EXAMPLES
    for src in sources:
        e = parse(src)
        print(f"source     : {src}")
        print(f"printed    : {to_string(e)}")
        print(f"variables  : {sorted(free_vars(e))}")
        print(f"value      : {evaluate(e, env)}")
        for var in sorted(free_vars(e)):
            d = simplify(differentiate(e, var))
            print(f"d/d{var}       : {to_string(d)}  = {evaluate(d, env)}")
        print()

    if not args.expr:
        print("caution: -x^2 squares the negated variable; write -(x^2) for")
        print("the negative of the square.")


if __name__ == "__main__":
    main()
