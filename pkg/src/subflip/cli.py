'''Command-line front end.  Every verb is a thin shim over a library call.'''

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from .approx import transfer_refinement, verify_transfer
from .depth import FlatnessQuery, RankQuery, bound_f, flat_witness, parse_radius, rank, sc_depth
from .flips import FlipSpec, flip, subflip
from .graph import INF, InstanceTooLarge, PreconditionError, format_colored, format_graph, parse_colored, parse_graph
from .logic import (
    classify, clique_family, co_matching_family, disjointify, ep_normal_form, free_vars, half_graph_search,
    mso_collapse, nep_check, parse_formula, render,
)
from .logic.evaluate import satisfying_assignments
from .logic.nep import nep_matrix, shared_coordinate_family
from .logic.normal_form import normal_form_report
from .partition import format_partition, parse_partition
from .patterns import CrossingLayers, PatternKind, generate, pattern_order
from .sparsify import (
    CoverFamily, comatching_cover_lift, cover_biclique_report, cover_sparsify, decompose, format_tree,
    format_witness, p_cover_check, parse_tree, parse_witness, recover, recover_covered, sparsify,
)
from .suite import format_results, run_suite
from .transduction import (
    Witness, apply, format_transduction, parse_transduction, pure_flip_transduction, subflip_recover,
)

DOMAIN_ERRORS = (PreconditionError, InstanceTooLarge, ValueError, OSError, RecursionError)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == '-':
        return sys.stdin.read()
    with open(path, encoding='utf-8') as fh:
        return fh.read()


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f'--{name.replace("_", "-")} is required')
    return value


def _graph(args):
    return parse_graph(_read(_need(args, 'graph')))


def _partition(args, G):
    return parse_partition(_read(_need(args, 'partition')), G.n)


def _relation(text: str | None) -> list[tuple[int, int]]:
    '''Pairs written as "0-1 1-1" or "0,1 1,1".'''
    out = []
    for tok in (text or '').replace(';', ' ').split():
        a, sep, b = tok.replace(',', '-').partition('-')
        if not sep:
            raise ValueError(f'bad relation pair {tok!r}')
        out.append((int(a), int(b)))
    return out


def _sets(text: str) -> list[list[int]]:
    '''One vertex set per line (the partition format without the disjointness rule).'''
    out = []
    for num, raw in enumerate(text.splitlines(), 1):
        s = raw.split('#', 1)[0].strip()
        if not s:
            continue
        try:
            out.append([int(x) for x in s.split()])
        except ValueError:
            raise ValueError(f'line {num}: expected vertex ids') from None
    return out


def _fmt_num(x) -> str:
    return 'inf' if x == INF else str(x)


def _witness_blocks(text: str) -> list[str]:
    '''Split concatenated witnesses at their "result" headers.'''
    blocks, cur = [], []
    for line in text.splitlines(keepends=True):
        if line.strip() == 'result' and cur:
            blocks.append(''.join(cur))
            cur = []
        if line.strip().startswith('piece '):
            continue
        cur.append(line)
    if cur:
        blocks.append(''.join(cur))
    return blocks


# -- verbs

def cmd_gen(args) -> str:
    if not args.params:
        raise UsageError('gen needs a generator name')
    kind, *rest = args.params
    try:
        params = [int(p) for p in rest]
    except ValueError:
        raise UsageError('generator parameters must be integers') from None
    if any(p < 1 for p in params):
        raise PreconditionError('generator orders must be at least 1')
    out = generate(kind, *params, reflexive=args.reflexive)
    if isinstance(out, CrossingLayers):
        text = format_graph(out.graph)
        for i, layer in enumerate(out.layers):
            text += f'# layer {i}: ' + ' '.join(map(str, sorted(layer))) + '\n'
        return text
    return format_graph(out)


def cmd_param(args) -> str:
    return f'{pattern_order(_graph(args), PatternKind(_need(args, "kind")))}\n'


def cmd_subflip(args) -> str:
    G = _graph(args)
    return format_graph(subflip(G, _partition(args, G)))


def cmd_flip(args) -> str:
    G = _graph(args)
    return format_graph(flip(G, FlipSpec.of(_partition(args, G), _relation(args.relation))))


def cmd_transfer(args) -> str:
    G = _graph(args)
    P = _partition(args, G)
    res = transfer_refinement(G, P, int(_need(args, 't')), check=args.verify)
    size = len(res.refinement)
    out = format_partition(res.refinement)
    out += f'# bound {size} <= {res.bound} {"ok" if size <= res.bound else "violated"}\n'
    if args.verify:
        out += f'# verify {"true" if verify_transfer(G, P, res, args.seed) else "false"}\n'
    return out


def cmd_rank(args) -> str:
    G = _graph(args)
    q = RankQuery(parse_radius(_need(args, 'r')), int(_need(args, 'k')), args.mode or 'subflip')
    return _fmt_num(rank(G, q)) + '\n'


def cmd_scdepth(args) -> str:
    return f'{sc_depth(_graph(args))}\n'


def cmd_flat(args) -> str:
    G = _graph(args)
    W = [tuple(int(x) for x in t.split()) for t in _need(args, 'tuples').split(';') if t.strip()]
    if not W:
        raise UsageError('--tuples needs at least one tuple')
    q = FlatnessQuery(parse_radius(_need(args, 'r')), int(_need(args, 'k')), int(_need(args, 'm')),
                      len(W[0]), args.mode or 'subflip')
    w = flat_witness(G, W, q)
    if w is None:
        return 'none\n'
    out = 'selected ' + '; '.join(' '.join(map(str, t)) for t in w.selected) + '\n'
    out += format_partition(w.partition)
    if w.relation is not None:
        out += 'relation ' + ' '.join(f'{a}-{b}' for a, b in sorted(w.relation)) + '\n'
    return out


def cmd_boundf(args) -> str:
    if len(args.params) != 4:
        raise UsageError('boundf needs T M K D')
    try:
        t, m, k, d = (int(x) for x in args.params)
    except ValueError:
        raise UsageError('boundf arguments must be integers') from None
    cap = int(args.cap) if args.cap is not None else None
    return f'{bound_f(t, m, k, d, cap)}\n'


def cmd_decompose(args) -> str:
    G = _graph(args)
    k = int(_need(args, 'k'))
    tree = decompose(G, k, int(args.d) if args.d is not None else INF)
    if tree is None:
        raise PreconditionError(f'no decomposition with {k} parts per level' +
                                (f' and depth at most {args.d}' if args.d is not None else ''))
    return format_tree(tree, k)


def cmd_sparsify(args) -> str:
    G = _graph(args)
    k = int(_need(args, 'k'))
    tree = None
    if args.tree is not None:
        tree, k_tree = parse_tree(_read(args.tree))
        k = k_tree if args.k is None else k
    d = int(args.d) if args.d is not None else None
    return format_witness(sparsify(G, tree, k, d))


def cmd_recover(args) -> str:
    return format_graph(recover(parse_witness(_read(_need(args, 'witness')))))


def cmd_cover(args) -> str:
    action = args.params[0] if args.params else 'sparsify'
    if action == 'recover':
        text = _read(_need(args, 'witness'))
        before, sep, rest = text.partition('\npiece ')
        if not sep:
            raise ValueError('expected the union graph followed by "piece" blocks')
        G_star = parse_graph(before)
        ws = [parse_witness(b) for b in _witness_blocks('piece ' + rest)]
        return format_graph(recover_covered(G_star, ws))
    G = _graph(args)
    sets = _sets(_read(_need(args, 'cover')))
    if action == 'check':
        p = int(args.p) if args.p is not None else 2
        return ('true' if p_cover_check(G.vertex_list, sets, p) else 'false') + '\n'
    if action == 'lift':
        i, (A, B) = comatching_cover_lift(G, sets, int(_need(args, 's')), int(_need(args, 't')))
        return f'set {i}\na ' + ' '.join(map(str, A)) + '\nb ' + ' '.join(map(str, B)) + '\n'
    if action != 'sparsify':
        raise UsageError(f'unknown cover action {action!r}')
    d = int(args.d) if args.d is not None else None
    G_star, ws = cover_sparsify(G, CoverFamily.of(sets), int(_need(args, 'k')), d)
    rep = cover_biclique_report(G_star, ws)
    out = format_graph(G_star)
    out += f'# biclique union {rep["union"]} pieces ' + ' '.join(map(str, rep['pieces'])) + '\n'
    for i, w in enumerate(ws, 1):
        out += f'piece {i}\n' + format_witness(w)
    return out


def cmd_formula(args) -> str:
    action = args.params[0] if args.params else 'classify'
    f = parse_formula(_need(args, 'formula'))
    if action == 'classify':
        c = classify(f)
        return (f'positive {str(c.positive).lower()}\nexistential {str(c.existential).lower()}\n'
                f'ep {str(c.ep).lower()}\nqrank {c.qrank}\n')
    if action == 'render':
        return render(f) + '\n'
    if action == 'normal-form':
        nf = ep_normal_form(f)
        out = f'radius {nf.radius}\n'
        for row in normal_form_report(nf):
            out += f'disjunct {row["disjunct"]} vars {",".join(row["vars"]) or "-"}: {row["conjunct"]}\n'
        return out
    if action == 'collapse':
        return render(mso_collapse(f)) + '\n'
    if action == 'eval':
        cg = parse_colored(_read(_need(args, 'graph')))
        fv = free_vars(f)
        rows = sorted(satisfying_assignments(cg, f, fv))
        if not fv:
            return ('true' if rows else 'false') + '\n'
        return ''.join(' '.join(map(str, r)) + '\n' for r in rows)
    raise UsageError(f'unknown formula action {action!r}')


NEP_FAMILIES: dict[str, Callable] = {
    'co-matching': co_matching_family,
    'clique': clique_family,
    'half-graph': lambda ell: _searched_half_graph(ell),
    'shared': shared_coordinate_family,
}


def _searched_half_graph(ell: int):
    found = half_graph_search(ell)
    if found is None:
        raise PreconditionError(f'no half-graph assignment found for {ell}')
    return found[2]


def cmd_nep(args) -> str:
    family = _need(args, 'family')
    if family not in NEP_FAMILIES:
        raise UsageError(f'unknown family {family!r}; choose from {", ".join(NEP_FAMILIES)}')
    inst = NEP_FAMILIES[family](int(_need(args, 'l')))
    if args.disjointify:
        inst = disjointify(inst)
    out = f'formula {render(inst.formula)}\n'
    out += ''.join('tuple ' + ' '.join(map(str, t)) + '\n' for t in inst.tuples)
    out += ''.join(''.join('1' if b else '0' for b in row) + '\n' for row in nep_matrix(inst))
    return out + f'nep {"true" if nep_check(inst) else "false"}\n'


def cmd_transduce(args) -> str:
    action = args.params[0] if args.params else 'apply'
    if action == 'apply':
        T = parse_transduction(_read(_need(args, 'transduction')))
        cg = parse_colored(_read(_need(args, 'witness')))
        return format_graph(apply(T, Witness(cg)))
    G = _graph(args)
    P = _partition(args, G)
    if action == 'pure-flip':
        T, w = pure_flip_transduction(G, FlipSpec.of(P, _relation(args.relation)))
    elif action == 'subflip-recover':
        T, w = subflip_recover(G, P, int(_need(args, 't')))
    else:
        raise UsageError(f'unknown transduce action {action!r}')
    return format_transduction(T) + format_colored(w.coloring)


def cmd_verify_suite(args) -> tuple[str, int]:
    results = run_suite(args.scale, args.seed)
    text = format_results(results, timings=args.timings)
    failed = sum(not r.passed for r in results)
    text += f'{len(results) - failed}/{len(results)} checks passed\n'
    return text, 0 if failed == 0 else 1


VERBS: dict[str, Callable] = {
    'gen': cmd_gen, 'param': cmd_param, 'subflip': cmd_subflip, 'flip': cmd_flip,
    'transfer': cmd_transfer, 'rank': cmd_rank, 'scdepth': cmd_scdepth, 'flat': cmd_flat,
    'boundf': cmd_boundf, 'decompose': cmd_decompose, 'sparsify': cmd_sparsify, 'recover': cmd_recover,
    'cover': cmd_cover, 'formula': cmd_formula, 'nep': cmd_nep, 'transduce': cmd_transduce,
    'verify-suite': cmd_verify_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog='subflip', description='Flips, subflips, sparsification and transductions.')
    p.add_argument('verb', choices=sorted(VERBS))
    p.add_argument('params', nargs='*', help='positional arguments of the verb')
    p.add_argument('--r', type=parse_radius)
    for flag in ('graph', 'partition', 'formula', 'witness', 'kind', 'relation', 'tuples', 'tree', 'cover',
                 'transduction', 'family'):
        p.add_argument(f'--{flag}')
    for flag in ('k', 't', 'd', 'm', 's', 'p', 'l', 'cap'):
        p.add_argument(f'--{flag}', type=int)
    p.add_argument('--mode', choices=('flip', 'subflip'))
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--scale', choices=('quick', 'full'), default='quick')
    p.add_argument('--reflexive', action='store_true')
    p.add_argument('--verify', action='store_true')
    p.add_argument('--disjointify', action='store_true')
    p.add_argument('--timings', action='store_true')
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = VERBS[args.verb](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f'subflip: error: {exc}', file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f'subflip: {exc}', file=sys.stderr)
        return 1
    code = 0
    if isinstance(result, tuple):
        result, code = result
    sys.stdout.write(result)
    return code


if __name__ == '__main__':
    sys.exit(main())
