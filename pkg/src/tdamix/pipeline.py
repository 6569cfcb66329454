"""End-to-end experiment: torus population, SIR landmark selection, Rips
persistence landscapes, landscape-value densities and mixture model selection.
"""

from __future__ import annotations

import json
import logging
import platform
from contextlib import contextmanager
from pathlib import Path

import numba
import numpy as np
import scipy
import yaml

from . import __version__
from .config import ExperimentConfig
from .curve import closed_curve_from_cloud, torus_sample
from .density import DensityEstimate, select_bandwidth
from .errors import PipelineError
from .io import (
    curve_header,
    write_csv,
    write_curve,
    write_density,
    write_diagram,
    write_landscape,
)
from .mixture import select_g
from .rng import substream
from .sir import SirConfig, resample_indices, select_k
from .tda import default_grid, landscape, rips_persistence

log = logging.getLogger("tdamix")

DENSITY_NODES = 2049
PARTIAL_MARKER = ".partial"


@contextmanager
def _stage(name):
    log.info("stage %s", name)
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


class LandmarkSampler:
    """Turns resampled landmark sets of one SIR pool into point clouds.

    Landmarks are population parameters, so every draw names ``k``
    population points; a sample cloud is the set of distinct points named by
    ``s`` resampled draws.
    """

    def __init__(self, sir_result, support, points):
        self.weights = sir_result.normalized_weights
        self.s = sir_result.config.s
        self.points = points
        thetas = np.array([w.landmarks.thetas for w in sir_result.pool])
        self.members = np.searchsorted(support, thetas)

    def cloud_indices(self, draws) -> np.ndarray:
        return np.unique(self.members[np.asarray(draws)].ravel())

    def draw(self, rng):
        return self.cloud_indices(resample_indices(self.weights, self.s, rng))


class _LandscapeDensity:
    def __init__(self, cfg: ExperimentConfig, grid):
        self.cfg = cfg
        self.grid = grid

    def diagram(self, cloud):
        return rips_persistence(cloud, self.cfg.max_scale, self.cfg.homology_dim)

    def landscape(self, diagram):
        return landscape(diagram, self.cfg.landscape_dim, self.grid, self.cfg.k_max)

    def density(self, values, bandwidth):
        return DensityEstimate(values, bandwidth, self.cfg.kernel)


def _versions():
    return {
        "tdamix": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "pyyaml": yaml.__version__,
    }


def _check_writable(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_test"
    probe.write_text("")
    probe.unlink()


def run_pipeline(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> dict:
    """Run every stage and write the artifact set; returns the manifest.

    A ``.partial`` marker sits in the output directory until the manifest
    has been written, so an interrupted or failed run is recognisable.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    with _stage("setup"):
        _check_writable(out)
        marker = out / PARTIAL_MARKER
        marker.write_text("run in progress or failed\n")
    files = {}

    def emit(name, writer, *args):
        writer(out / name, *args)

    seed = cfg.seed
    with _stage("population"):
        pts, phi, _ = torus_sample(cfg.M, cfg.torus_R, cfg.torus_r,
                                   substream(seed, "population"), return_angles=True)
        curve = closed_curve_from_cloud(pts, phi)
        support = curve.params[:-1]
        population = curve.points[:-1]
        emit("population.csv", write_curve, support, population)
        files["population.csv"] = curve_header(3)

    with _stage("sir"):
        template = SirConfig(cfg.M, cfg.s, min(cfg.k_range), cfg.eta_upper, seed)
        selection = select_k(curve, template, cfg.k_range, substream(seed, "sir"), support=support)
        for k, res in selection.results.items():
            rows = []
            for draw, ls in enumerate(res.posterior):
                for j, (t, p) in enumerate(zip(ls.thetas, curve.evaluate(ls.thetas))):
                    rows.append((draw, j, t, *p))
            name = f"landmarks_k{k}.csv"
            write_csv(out / name, ["draw", "landmark", "t", "x", "y", "z"], rows)
            files[name] = ["draw", "landmark", "t", "x", "y", "z"]
        write_csv(out / "table1.csv", ["k", "mean_elastic_distance"], sorted(selection.table.items()))
        files["table1.csv"] = ["k", "mean_elastic_distance"]
        log.info("k* = %d", selection.k_star)

    grid = default_grid(cfg.t_min, cfg.t_max, cfg.grid_points)
    ld = _LandscapeDensity(cfg, grid)
    sampler = LandmarkSampler(selection.results[selection.k_star], support, population)

    with _stage("population_tda"):
        pop_diagram = ld.diagram(population)
        pop_land = ld.landscape(pop_diagram)
        emit("diagram_pop.csv", write_diagram, pop_diagram)
        emit("landscape_pop.csv", write_landscape, pop_land)
        files["diagram_pop.csv"] = ["dim", "birth", "death"]
        files["landscape_pop.csv"] = ["k", "t", "lambda"]

    with _stage("sample_tda"):
        sample_idx = sampler.cloud_indices(selection.results[selection.k_star].posterior_indices)
        sample_diagram = ld.diagram(population[sample_idx])
        sample_land = ld.landscape(sample_diagram)
        emit("diagram_sample_0.csv", write_diagram, sample_diagram)
        emit("landscape_sample_0.csv", write_landscape, sample_land)
        files["diagram_sample_0.csv"] = ["dim", "birth", "death"]
        files["landscape_sample_0.csv"] = ["k", "t", "lambda"]

    with _stage("density"):
        pop_values = pop_land.values(1)
        sample_values = sample_land.values(1)
        bandwidth = cfg.bandwidth
        if cfg.h_grid is not None:
            choice = select_bandwidth(pop_values, cfg.kernel, cfg.h_grid)
            bandwidth = choice.bandwidth
            write_csv(out / "bandwidth_risk.csv", ["h", "J"], choice.table)
            files["bandwidth_risk.csv"] = ["h", "J"]
        reference = ld.density(pop_values, bandwidth)
        pad = 10.0 * bandwidth
        # landscape values never exceed half the filtration cap
        value_range = (-pad, cfg.max_scale / 2.0 + pad)
        xs = np.linspace(*value_range, DENSITY_NODES)
        emit("density_pop.csv", write_density, xs, reference(xs))
        emit("density_sample_0.csv", write_density, xs, ld.density(sample_values, bandwidth)(xs))
        files["density_pop.csv"] = ["x", "f"]
        files["density_sample_0.csv"] = ["x", "f"]

    component_means = {}

    def factory(g, run, i, rng):
        cloud = population[sampler.draw(rng)]
        values = ld.landscape(ld.diagram(cloud)).values(1)
        component_means[(g, run, i)] = float(values.mean())
        return ld.density(values, bandwidth)

    with _stage("mixture"):
        report = select_g(factory, cfg.g_range, cfg.runs, reference, value_range,
                          seed=seed, workers=workers)
        write_csv(out / "imse_raw.csv", ["g", "run", "imse"],
                  [(g, run, v) for g in report.g_values for run, v in enumerate(report.raw[g])])
        write_csv(out / "table2.csv", ["g", "mean_imse"],
                  [(g, report.means[g]) for g in report.g_values])
        files["imse_raw.csv"] = ["g", "run", "imse"]
        files["table2.csv"] = ["g", "mean_imse"]

    with _stage("manifest"):
        h1 = np.sort(pop_diagram.persistence(1))[::-1] if cfg.homology_dim >= 1 else np.array([])
        comp = np.array([component_means[key] for key in sorted(component_means)])
        summary = {
            "k_star": selection.k_star,
            "table1": {str(k): v for k, v in sorted(selection.table.items())},
            "g_star": report.g_star,
            "mean_imse": report.means[report.g_star],
            "table2": {str(g): report.means[g] for g in report.g_values},
            "bandwidth": bandwidth,
            "imse_range": list(value_range),
            "population_points": int(len(population)),
            "sample_points": int(len(sample_idx)),
            "population_landscape_mean": float(pop_values.mean()),
            "sample_landscape_mean": float(sample_values.mean()),
            "sample_landscape_std": float(sample_values.std(ddof=1)),
            "component_landscape_mean": float(comp.mean()),
            "component_landscape_std": float(comp.std(ddof=1)) if comp.size > 1 else 0.0,
            "population_h1_top_persistence": [float(v) for v in h1[:3]],
            "population_h1_dominance_ratio": float(h1[1] / h1[2]) if h1.size >= 3 else None,
            "sample_h1_top_persistence": [float(v) for v in np.sort(sample_diagram.persistence(1))[::-1][:3]]
            if cfg.homology_dim >= 1 else [],
        }
        manifest = {
            "config": cfg.echo(),
            "seed": seed,
            "versions": _versions(),
            "summary": summary,
            "files": files,
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        marker.unlink()
    return manifest
