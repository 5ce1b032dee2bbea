import subprocess
import sys

import pytest

from subflip.cli import main
from subflip.depth import RankQuery, rank
from subflip.flips import FlipSpec, flip, subflip
from subflip.graph import format_graph, parse_graph
from subflip.partition import Partition, format_partition
from subflip.patterns import clique, co_matching, cycle, path
from subflip.sparsify import format_witness, sparsify


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_gen_and_param_examples(capsys, files):
    code, out, _ = run(capsys, 'gen', 'co-matching', '3')
    assert code == 0 and out == format_graph(co_matching(3))
    g = files('p4.txt', format_graph(path(4)))
    assert run(capsys, 'param', '--graph', g, '--kind', 'co-matching')[1] == '2\n'
    code, out, _ = run(capsys, 'gen', 'star-crossing', '1', '2')
    assert code == 0 and '# layer 0:' in out
    assert parse_graph(out).n == 8


def test_sparsify_recover_round_trip(capsys, files, tmp_path):
    text = format_graph(clique(3, reflexive=True))
    g = files('k3.txt', text)
    code, wit, _ = run(capsys, 'sparsify', '--graph', g, '--k', '1')
    assert code == 0 and wit == format_witness(sparsify(clique(3, reflexive=True), None, 1))
    w = files('w.txt', wit)
    code, out, _ = run(capsys, 'recover', '--witness', w)
    assert code == 0 and out == text


def test_outputs_are_deterministic(capsys, files):
    g = files('c4.txt', format_graph(cycle(4, reflexive=True)))
    first = run(capsys, 'sparsify', '--graph', g, '--k', '2')
    assert run(capsys, 'sparsify', '--graph', g, '--k', '2') == first
    t = files('t.txt', run(capsys, 'decompose', '--graph', g, '--k', '2')[1])
    assert run(capsys, 'sparsify', '--graph', g, '--tree', t, '--k', '2') == first


def test_shims_match_library(capsys, files):
    G = path(4)
    P = Partition.of([[0, 1], [2, 3]])
    g = files('g.txt', format_graph(G))
    p = files('p.txt', format_partition(P))
    assert run(capsys, 'subflip', '--graph', g, '--partition', p)[1] == format_graph(subflip(G, P))
    out = run(capsys, 'flip', '--graph', g, '--partition', p, '--relation', '0-1 1-1')[1]
    assert out == format_graph(flip(G, FlipSpec.of(P, [(0, 1), (1, 1)])))
    for r, k, mode in (('inf', '2', 'subflip'), ('1', '2', 'flip')):
        expect = rank(G, RankQuery(float(r) if r == 'inf' else int(r), int(k), mode))
        assert run(capsys, 'rank', '--graph', g, '--r', r, '--k', k, '--mode', mode)[1] == f'{expect}\n'
    assert run(capsys, 'scdepth', '--graph', g)[1] == '2\n'
    assert run(capsys, 'boundf', '2', '1', '2', '2')[1] == f'{2 ** 135}\n'
    out = run(capsys, 'transfer', '--graph', g, '--partition', p, '--t', '3', '--verify')[1]
    assert out.startswith('0 1\n2 3\n') and '# verify true' in out


def test_rank_inf_output(capsys, files):
    g = files('p4.txt', format_graph(path(4)))
    assert run(capsys, 'rank', '--graph', g, '--r', 'inf', '--k', '1')[1] == 'inf\n'


def test_flat_formula_nep(capsys, files):
    g = files('m.txt', 'graph 4\nloops none\nedges\n0 1\n2 3\n')
    out = run(capsys, 'flat', '--graph', g, '--tuples', '0;2', '--m', '2', '--r', 'inf', '--k', '2')[1]
    assert out.startswith('selected 0; 2\n')
    out = run(capsys, 'formula', 'classify', '--formula', 'E(x,y) | exists z (E(x,z) & E(z,y))')[1]
    assert 'ep true' in out and 'qrank 1' in out
    assert run(capsys, 'formula', 'collapse', '--formula', 'existsS Y forall x Y(x)')[1] == 'forall x top\n'
    cg = files('cg.txt', 'graph 3\nloops none\nedges\n0 1\n1 2\ncolor C: 2\n')
    assert run(capsys, 'formula', 'eval', '--formula', 'E(x,y) & C(y)', '--graph', cg)[1] == '1 2\n'
    assert run(capsys, 'nep', '--family', 'half-graph', '--l', '4')[1].endswith('nep true\n')
    assert run(capsys, 'nep', '--family', 'shared', '--l', '3', '--disjointify')[1].endswith('nep true\n')


def test_cover_verbs(capsys, files):
    C4 = cycle(4, reflexive=True)
    g = files('c4.txt', format_graph(C4))
    c = files('cover.txt', '0 1 2\n2 3 0\n1 3\n')
    assert run(capsys, 'cover', 'check', '--graph', g, '--cover', c)[1] == 'true\n'
    code, out, _ = run(capsys, 'cover', '--graph', g, '--cover', c, '--k', '2')
    assert code == 0 and out.count('piece ') == 3
    w = files('cw.txt', out)
    assert run(capsys, 'cover', 'recover', '--witness', w)[1] == format_graph(C4)
    bad = files('bad.txt', '0 1 2\n2 3 0\n')
    assert run(capsys, 'cover', '--graph', g, '--cover', bad, '--k', '2')[0] == 1
    cm = files('cm.txt', format_graph(co_matching(4)))
    one = files('one.txt', '0 1 2 3 4 5 6 7\n')
    out = run(capsys, 'cover', 'lift', '--graph', cm, '--cover', one, '--s', '1', '--t', '4')[1]
    assert out == 'set 1\na 0 1 2 3\nb 4 5 6 7\n'


def test_transduce_verbs(capsys, files):
    C4 = cycle(4, reflexive=True)
    g = files('c4.txt', format_graph(C4))
    p = files('p.txt', '0 2\n1 3\n')
    out = run(capsys, 'transduce', 'pure-flip', '--graph', g, '--partition', p, '--relation', '0-1')[1]
    head, _, rest = out.partition('graph ')
    t = files('t.txt', head)
    w = files('w.txt', 'graph ' + rest)
    assert run(capsys, 'transduce', 'apply', '--transduction', t, '--witness', w)[1] == format_graph(C4)
    K2 = files('k2.txt', 'graph 2\nloops none\nedges\n0 1\n')
    whole = files('whole.txt', '0 1\n')
    code, out, _ = run(capsys, 'transduce', 'subflip-recover', '--graph', K2, '--partition', whole, '--t', '3')
    assert code == 0 and out.startswith('colors:')


def test_exit_codes(capsys, files, tmp_path):
    assert run(capsys, 'rank', '--graph', str(tmp_path / 'missing'), '--r', '1', '--k', '1')[0] == 1
    bad = files('bad.txt', 'graph 2\nloops none\nedges\n0 0\n')
    code, _, err = run(capsys, 'scdepth', '--graph', bad)
    assert code == 1 and err.startswith('subflip:')
    with pytest.raises(SystemExit) as exc:
        main(['frobnicate'])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(['rank', '--r', 'x'])
    assert exc.value.code == 2
    capsys.readouterr()
    assert run(capsys, 'rank', '--r', '1', '--k', '1')[0] == 2
    g = files('p4.txt', format_graph(path(4)))
    assert run(capsys, 'decompose', '--graph', g, '--k', '1')[0] == 1
    assert run(capsys, 'formula', 'classify', '--formula', 'E(x,')[0] == 1


def test_size_cap_env(capsys, files, monkeypatch):
    g = files('p6.txt', format_graph(path(6)))
    assert run(capsys, 'rank', '--graph', g, '--r', '1', '--k', '2', '--mode', 'flip')[0] == 1
    monkeypatch.setenv('SUBFLIP_MAX_N', '6')
    assert run(capsys, 'rank', '--graph', g, '--r', '1', '--k', '2', '--mode', 'flip')[0] == 0
    g3 = files('p3.txt', format_graph(path(3)))
    monkeypatch.setenv('SUBFLIP_MAX_N', '2')
    assert run(capsys, 'rank', '--graph', g3, '--r', '1', '--k', '2')[0] == 1


def test_verify_suite_quick(capsys):
    code, out, _ = run(capsys, 'verify-suite')
    assert code == 0
    assert out.count('PASS') == 12 and out.endswith('12/12 checks passed\n')


def test_module_entry_point(tmp_path):
    g = tmp_path / 'g.txt'
    g.write_text(format_graph(path(4)))
    res = subprocess.run([sys.executable, '-m', 'subflip', 'param', '--graph', str(g), '--kind', 'co-matching'],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == '2\n'
    res = subprocess.run([sys.executable, '-m', 'subflip', 'nope'], capture_output=True, text=True)
    assert res.returncode == 2
