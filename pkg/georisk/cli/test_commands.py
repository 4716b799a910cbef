"""
End-to-end runs of the batch commands
"""

import json
import math

import pandas as pd
import pytest

from georisk.cli import EXIT_INPUT_ERROR, EXIT_OK, cli_main
from georisk.database import RunArchive
from georisk.portfolio import INFEASIBLE, OPTIMAL

COHERENT = {'family': 'dual', 'params': {'scenarios': 'all', 'r': {'family': 'coherent'}}}


@pytest.fixture
def measure_file(tmp_path):
    def write(spec, name='measure.json'):
        path = tmp_path / name
        path.write_text(json.dumps(spec), encoding='utf-8')
        return str(path)

    return write


def _read(path):
    return json.loads(path.read_text(encoding='utf-8'))


def test_eval_h0(example_csv, measure_file, tmp_path):
    out = tmp_path / 'eval.json'
    spec = measure_file({'family': 'h0', 'params': {'scenario': 'P'}})
    code = cli_main(['eval', '--scenarios', str(example_csv), '--measure', spec, '--position', 'X', '--out', str(out)])
    assert code == EXIT_OK
    report = _read(out)
    assert report['command'] == 'eval'
    assert report['passed'] is True
    assert report['result']['values'] == {'X': pytest.approx(math.exp(1.5), rel=1e-15)}


def test_eval_csv(example_csv, measure_file, tmp_path):
    out = tmp_path / 'eval.csv'
    spec = measure_file({'family': 'h0'})
    assert cli_main(['eval', '--scenarios', str(example_csv), '--measure', spec, '--out', str(out)]) == EXIT_OK
    table = pd.read_csv(out)
    assert table.position.tolist() == ['X', 'Y', 'Z']
    assert table.value.tolist() == pytest.approx([math.exp(1.5), math.exp(2.0), math.exp(3.5)], rel=1e-11)


def test_counterexamples_on_stdout(capsys):
    assert cli_main(['counterexamples']) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['result']['confirmed'] is True
    assert all(item['margin'] > 0 for item in report['result']['inequalities'])


def test_classify_is_reproducible(example_csv, measure_file, tmp_path):
    spec = measure_file({'family': 'avar', 'params': {'alpha': 0.25}, 'side': 'monetary',
                         'tolerances': {'n_samples': 60}})
    texts = []
    for name in ('a.json', 'b.json'):
        out = tmp_path / name
        code = cli_main(['classify', '--scenarios', str(example_csv), '--measure', spec, '--seed', '7',
                         '--out', str(out)])
        assert code == EXIT_OK
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
    result = json.loads(texts[0])['result']
    assert result['seed'] == 7
    assert result['n_samples'] == 60


def test_classify_without_seed_writes_an_error_report(example_csv, measure_file, tmp_path):
    out = tmp_path / 'error.json'
    spec = measure_file({'family': 'h0'})
    code = cli_main(['classify', '--scenarios', str(example_csv), '--measure', spec, '--out', str(out)])
    assert code == EXIT_INPUT_ERROR
    report = _read(out)
    assert report['exit_code'] == EXIT_INPUT_ERROR
    assert 'seed' in report['error']['message']


def test_ingest_error_report_locates_the_cell(scenario_csv, measure_file, tmp_path):
    bad = scenario_csv(['outcome', 'p', 'X'], [['a', 0.5, 1.0], ['b', 0.5, 'oops']])
    out = tmp_path / 'error.json'
    code = cli_main(['eval', '--scenarios', str(bad), '--measure', measure_file({'family': 'h0'}), '--out', str(out)])
    assert code == EXIT_INPUT_ERROR
    error = _read(out)['error']
    assert error['type'] == 'IngestError'
    assert (error['row'], error['column']) == (3, 'X')


def test_recover_r_for_a_coherent_measure(example_csv, measure_file, tmp_path):
    out = tmp_path / 'recover.json'
    code = cli_main(['recover-r', '--scenarios', str(example_csv), '--measure', measure_file(COHERENT),
                     '--t-grid', '-1:1:1', '--seed', '1', '--out', str(out)])
    assert code == EXIT_OK
    result = _read(out)['result']
    rows = result['rows']
    assert [row['t'] for row in rows] == [-1, 0, 1]
    for row in rows:
        # constant positions attain R(t) = t
        assert row['recovered'] == pytest.approx(row['t'], abs=1e-6)
        assert row['recovered'] >= row['exact'] - 1e-9
        assert row['oracle'] is not None
    assert result['expansive']['properties']['expansive']['holds'] is True
    assert result['checks']['all_hold'] is True
    assert result['reproduction']['holds'] is True


def test_recover_r_reports_a_noncanonical_penalty(example_csv, measure_file, tmp_path):
    out = tmp_path / 'recover.json'
    spec = {'family': 'dual', 'params': {'scenarios': 'all', 'r': {'family': 'convex_penalty', 'c': [0.0, 5.0]}}}
    code = cli_main(['recover-r', '--scenarios', str(example_csv), '--measure', measure_file(spec),
                     '--t-grid', '0:1:0', '--seed', '1', '--scenario', '1', '--out', str(out)])
    # the other scenario caps the recovered value near -8/3, well above R(0) = -5
    assert code == EXIT_OK
    result = _read(out)['result']
    assert result['reproduction']['holds'] is False
    assert result['rows'][0]['recovered'] > result['rows'][0]['exact'] + 1.0


def test_recover_r_outside_the_box(example_csv, measure_file, tmp_path):
    out = tmp_path / 'recover.json'
    code = cli_main(['recover-r', '--scenarios', str(example_csv), '--measure', measure_file(COHERENT),
                     '--t-grid', '9:1:9', '--seed', '1', '--out', str(out)])
    assert code == EXIT_INPUT_ERROR
    assert _read(out)['error']['type'] == 'InfeasibleError'


def test_frontier_csv(scenario_csv, measure_file, tmp_path):
    assets = scenario_csv(['outcome', 'p', 'A', 'B'], [['w1', 0.5, 0.8, 1.4], ['w2', 0.5, 1.5, 0.9]])
    out = tmp_path / 'frontier.csv'
    spec = measure_file({'family': 'pnorm', 'params': {'gamma': 2.0}})
    code = cli_main(['frontier', '--scenarios', str(assets), '--measure', spec, '--r-grid', '0.06:0.02:0.16',
                     '--out', str(out)])
    assert code == EXIT_OK
    table = pd.read_csv(out)
    assert list(table.columns) == ['r', 'w_1', 'w_2', 'value', 'status']
    # the smallest log growth on the simplex is E[log A] ~ 0.091
    assert table.status.tolist() == [INFEASIBLE] * 2 + [OPTIMAL] * 4
    feasible = table[table.status == OPTIMAL]
    assert (feasible.w_1 + feasible.w_2).tolist() == pytest.approx([1.0] * 4)
    assert table.w_1.isna().tolist()[:2] == [True, True]


def test_allocate(example_csv, measure_file, tmp_path):
    out = tmp_path / 'allocate.json'
    code = cli_main(['allocate', '--scenarios', str(example_csv), '--measure', measure_file(COHERENT),
                     '--units', 'X,Y', '--total', 'Z', '--composition', 'multiplicative', '--out', str(out)])
    assert code == EXIT_OK
    result = _read(out)['result']
    # log Z = (2, 5) is heaviest under d1, weights (0.4, 0.6)
    assert result['scenario_index'] == 0
    assert result['allocations'] == pytest.approx([math.exp(1.8), math.exp(2.0)], rel=1e-12)
    assert result['total_risk'] == pytest.approx(math.exp(3.8), rel=1e-12)


def test_allocate_csv_lists_the_scenario_density(example_csv, measure_file, tmp_path):
    out = tmp_path / 'allocate.csv'
    code = cli_main(['allocate', '--scenarios', str(example_csv), '--measure', measure_file(COHERENT),
                     '--units', 'X,Y', '--total', 'Z', '--composition', 'multiplicative', '--rule', 'proportional',
                     '--out', str(out)])
    assert code == EXIT_OK
    table = pd.read_csv(out)
    assert table.unit.tolist() == ['X', 'Y', 'Q_X[w1]', 'Q_X[w2]']
    assert table.allocation.tolist()[2:] == pytest.approx([0.8, 1.2])


def test_allocate_needs_a_dual_spec(example_csv, measure_file):
    code = cli_main(['allocate', '--scenarios', str(example_csv), '--measure', measure_file({'family': 'h0'}),
                     '--units', 'X', '--total', 'Z'])
    assert code == EXIT_INPUT_ERROR


def test_simulate(scenario_csv, tmp_path):
    paths = scenario_csv(['outcome', 'p', 'A', 'B'], [['t1', 0.5, 1.1, 0.9], ['t2', 0.5, 1.2, 1.0]])
    out = tmp_path / 'wealth.json'
    assert cli_main(['simulate', '--scenarios', str(paths), '--w', '0.5,0.5', '--out', str(out)]) == EXIT_OK
    wealth = _read(out)['result']['wealth']
    assert wealth['buy_and_hold'] == pytest.approx([1.0, 1.0, 1.11])
    assert wealth['rebalanced'] == pytest.approx([1.0, 1.0, 1.1])


def test_simulate_rejects_weights_off_the_simplex(scenario_csv):
    paths = scenario_csv(['outcome', 'p', 'A', 'B'], [['t1', 0.5, 1.1, 0.9], ['t2', 0.5, 1.2, 1.0]])
    assert cli_main(['simulate', '--scenarios', str(paths), '--w', '0.7,0.7']) == EXIT_INPUT_ERROR


def test_runs_are_archived(tmp_path):
    db = tmp_path / 'runs.db'
    assert cli_main(['counterexamples', '--archive', str(db), '--out', str(tmp_path / 'ce.json')]) == EXIT_OK
    with RunArchive(str(db)) as archive:
        runs = archive.list_runs()
    assert len(runs) == 1
    assert runs[0]['command'] == 'counterexamples'
    assert runs[0]['exit_code'] == EXIT_OK
    assert runs[0]['report_json']['confirmed'] is True
