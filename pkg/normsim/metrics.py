"""
Per-step metrics, rolling aggregation, norm emergence and the statistics
used to compare societies.
"""
import collections
import glob
import logging
import math
import os

import numpy as np
import pandas as pd
from scipy import stats

from normsim.base import DegenerateSample
from normsim.base import MismatchedRuns
from normsim.base import OutputError
from normsim.base import WindowZero
from normsim.base import ZeroControlVariance
from normsim.disease import HealthState

log = logging.getLogger(__name__)

COLUMNS = ['steps', 'healthy', 'infected', 'deceased', 'vaccinated',
           'isolation', 'forced_quarantine', 'total_number_infections',
           'desire_satisfaction']

METRICS = COLUMNS[1:]

MetricsRow = collections.namedtuple('MetricsRow', COLUMNS)

ComparisonRow = collections.namedtuple(
    'ComparisonRow',
    ['metric', 'experimental', 'control', 'experimental_mean',
     'control_mean', 'p_value', 'delta', 'descriptor'])

DESCRIPTORS = ((0.2, 'negligible'), (0.5, 'small'), (0.8, 'medium'))


def compute_metrics(world, step=None):
    """
    Metrics of *world* after its last step. Percentages are of the initial
    population; isolation is the share of infected agents at home, 1.0 when
    nobody is infected. Desire satisfaction is the share of the initial
    population whose goal was met, so the dead count as unmet.
    """
    report = world.last_report
    step = world.t - 1 if step is None else step
    population = len(world.agents)
    counts = world.counts()
    infected = [a for a in world.agents if a.health.infectious]
    if infected:
        isolation = sum(1 for a in infected if a.at_home) \
            / float(len(infected))
    else:
        isolation = 1.0
    forced = len(report.forced) if report is not None else 0
    goal = report.goals_met / float(population) if report is not None else 0.0
    return MetricsRow(
        steps=step,
        healthy=100.0 * counts[HealthState.HEALTHY] / population,
        infected=100.0 * len(infected) / population,
        deceased=100.0 * counts[HealthState.DECEASED] / population,
        vaccinated=100.0 * sum(1 for a in world.agents if a.vaccinated)
        / population,
        isolation=isolation,
        forced_quarantine=forced,
        total_number_infections=world.cumulative_infections
        / float(population),
        desire_satisfaction=goal)


def write_metrics(rows, path):
    frame = pd.DataFrame(list(rows), columns=COLUMNS)
    try:
        frame.to_csv(path, index=False, float_format='%.10g')
    except (IOError, OSError) as e:
        raise OutputError(path, e)
    return frame


def read_metrics(path):
    try:
        return pd.read_csv(path)
    except (IOError, OSError) as e:
        raise OutputError(path, e)


def rolling_average(series, window):
    """
    Trailing mean over the last *window* points, fewer at the start.
    """
    if window < 1:
        raise WindowZero('rolling window must be at least 1, got %r'
                         % (window,))
    rolled = pd.Series(series, dtype=float).rolling(window, min_periods=1)
    return rolled.mean().to_numpy()


def norm_emerged(series, threshold=0.9):
    """First index at which *series* reaches *threshold*, or None"""
    for i, value in enumerate(series):
        if value >= threshold:
            return i
    return None


def emergence(frame, window=50, threshold=0.9):
    """
    Emergence steps of the self-isolation and vaccination norms in one
    run's metrics.
    """
    isolation = rolling_average(frame['isolation'], window)
    vaccination = rolling_average(frame['vaccinated'] / 100.0, window)
    return collections.OrderedDict([
        ('isolation', norm_emerged(isolation, threshold)),
        ('vaccination', norm_emerged(vaccination, threshold)),
    ])


def t_test_independent(sample_a, sample_b):
    """
    Two-sided Welch t-test p-value of the difference in means.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise DegenerateSample(
            't-test needs at least 2 points per sample, got %d and %d'
            % (len(a), len(b)))
    if a.var() == 0.0 and b.var() == 0.0:
        raise DegenerateSample('both samples have zero variance')
    return float(stats.ttest_ind(a, b, equal_var=False).pvalue)


def glass_delta(experimental, control):
    """
    Glass' effect size: the difference in means over the control's sample
    standard deviation.
    """
    e = np.asarray(experimental, dtype=float)
    c = np.asarray(control, dtype=float)
    if len(c) < 2:
        raise DegenerateSample(
            'control needs at least 2 points, got %d' % len(c))
    sd = c.std(ddof=1)
    if sd == 0.0:
        raise ZeroControlVariance('control sample has zero variance')
    return float((e.mean() - c.mean()) / sd)


def cohen_descriptor(delta):
    if delta is None or math.isnan(delta):
        return 'undefined'
    magnitude = abs(delta)
    for bound, name in DESCRIPTORS:
        if magnitude < bound:
            return name
    return 'large'


def _p_value(a, b):
    try:
        return t_test_independent(a, b)
    except DegenerateSample:
        return 1.0 if np.mean(a) == np.mean(b) else 0.0


def _delta(e, c):
    try:
        return glass_delta(e, c)
    except ZeroControlVariance:
        return 0.0 if np.mean(e) == np.mean(c) else float('nan')


class ComparisonReport(object):
    def __init__(self, rows):
        self.rows = list(rows)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def get(self, metric, control=None):
        for row in self.rows:
            if row.metric == metric \
                    and (control is None or row.control == control):
                return row
        raise KeyError(metric)

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=ComparisonRow._fields)

    def to_csv(self, path):
        try:
            self.to_frame().to_csv(path, index=False, float_format='%.10g')
        except (IOError, OSError) as e:
            raise OutputError(path, e)

    def to_string(self):
        frame = self.to_frame()
        return frame.to_string(index=False, float_format=lambda v: '%.4f' % v)


def converged_values(society_dir, metrics=None, window=500):
    """
    One value per run under *society_dir*: the mean of each metric over the
    run's final *window* steps.
    """
    metrics = metrics or METRICS
    paths = sorted(glob.glob(os.path.join(society_dir, 'seed-*',
                                          'metrics.csv')))
    rows = []
    for path in paths:
        frame = read_metrics(path)
        rows.append(frame[metrics].tail(window).mean())
    return pd.DataFrame(rows, columns=metrics)


def compare(experimental, controls, metrics=None, window=500):
    """
    Compare the runs under the society directory *experimental* with those
    under each directory in *controls*, metric by metric.
    """
    if window < 1:
        raise WindowZero('convergence window must be at least 1')
    if isinstance(controls, str):
        controls = [controls]
    if not controls:
        raise MismatchedRuns('nothing to compare %s against' % experimental)
    metrics = list(metrics or METRICS)
    unknown = set(metrics).difference(METRICS)
    if unknown:
        raise MismatchedRuns('unknown metric(s) %s'
                             % ', '.join(sorted(unknown)))

    exp_values = converged_values(experimental, metrics, window)
    name = os.path.basename(os.path.normpath(experimental))
    rows = []
    for control in controls:
        ctl_values = converged_values(control, metrics, window)
        ctl_name = os.path.basename(os.path.normpath(control))
        if len(exp_values) == 0 or len(exp_values) != len(ctl_values):
            raise MismatchedRuns(
                '%s has %d completed run(s), %s has %d'
                % (experimental, len(exp_values), control, len(ctl_values)))
        for metric in metrics:
            e = exp_values[metric].to_numpy()
            c = ctl_values[metric].to_numpy()
            delta = _delta(e, c)
            rows.append(ComparisonRow(
                metric, name, ctl_name, float(e.mean()), float(c.mean()),
                _p_value(e, c), delta, cohen_descriptor(delta)))
        log.info('compared %s with %s over %d run(s)',
                 name, ctl_name, len(exp_values))
    return ComparisonReport(rows)
