"""Desk-scale reach task, tabular learner, noise injection and scenario runners."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _core
from .symbolizer import DEFAULT_CONFIG, SymbolizerConfig, action_centers, symbolize_state

OBSERVATION = "observation"
ACTION = "action"
_CHANNEL_CODE = {None: 0, "none": 0, OBSERVATION: 1, ACTION: 2}


@dataclass
class ReachEnv:
    """Point reach in a cube; the observation is target minus position."""

    step_scale: float = 0.1
    bound: float = 0.5
    success_radius: float = 0.1
    max_steps: int = 500
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    target: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t: int = 0

    def reset(self, target, position=None) -> np.ndarray:
        self.target = np.clip(np.asarray(target, dtype=float), -self.bound, self.bound)
        self.position = np.zeros_like(self.target) if position is None else np.clip(
            np.asarray(position, dtype=float), -self.bound, self.bound)
        self.t = 0
        return self.observation()

    def observation(self) -> np.ndarray:
        return self.target - self.position

    def distance(self) -> float:
        return float(math.sqrt(float(np.sum(self.observation() ** 2))))


def env_step(env: ReachEnv, action) -> tuple[np.ndarray, float, bool]:
    a = np.asarray(action, dtype=float)
    if a.shape != env.position.shape:
        raise ValueError(f"action shape {a.shape} does not match position {env.position.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite action")
    env.position = np.clip(env.position + env.step_scale * a, -env.bound, env.bound)
    env.t += 1
    done = env.distance() < env.success_radius or env.t >= env.max_steps
    return env.observation(), -1.0, bool(done)


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian corruption of one channel from ``onset`` on.

    ``unit`` scales the standard deviation, so ``sigma2`` is in squared units.
    """

    channel: str | None = None
    sigma2: float = 0.0
    onset: int = 0
    unit: float = 1.0

    def __post_init__(self):
        if self.channel not in _CHANNEL_CODE:
            raise ValueError(f"unknown noise channel {self.channel!r}")
        if self.sigma2 < 0 or self.onset < 0 or self.unit <= 0:
            raise ValueError("need sigma2 >= 0, onset >= 0, unit > 0")

    @property
    def sd(self) -> float:
        return self.unit * math.sqrt(self.sigma2)


def inject_noise(v, spec: NoiseSpec, rng: np.random.Generator, t: int | None = None) -> np.ndarray:
    x = np.asarray(v, dtype=float)
    if spec.sigma2 == 0 or (t is not None and t < spec.onset):
        return x.copy()
    return x + spec.sd * rng.standard_normal(x.shape)


@dataclass(frozen=True)
class EnvParams:
    step_scale: float = 0.1
    target_range: float = 0.15
    bound: float = 0.5
    success_radius: float = 0.1
    max_steps: int = 500


@dataclass(frozen=True)
class AgentParams:
    eps0: float = 1.0
    eps_end: float = 0.0
    eps_steps: int = 30000
    alpha: float = 1.0
    alpha_min: float = 0.01
    gamma: float = 0.95
    q_init: float = -20.0
    shaping: float = 50.0
    shape_gamma: float = 0.95
    shape_offset: float = 2.0


@dataclass(frozen=True)
class Preset:
    env: EnvParams
    agent: AgentParams


# Small steps over the whole workspace keep exploration slow enough for the
# learning-phase signatures; a plain progress bonus learns fastest there.
LEARNING_ENV = EnvParams(step_scale=0.01, target_range=0.5)
LEARNING_AGENT = AgentParams(shape_gamma=1.0, shape_offset=0.0)
# Deployment runs at the default step near the origin. The potential-based bonus
# makes standing still strictly costly, which removes self-loop traps.
DEPLOYMENT_ENV = EnvParams(step_scale=0.1, target_range=0.15)
DEPLOYMENT_AGENT = AgentParams(shape_gamma=0.95, shape_offset=2.0)
PRESETS = {
    "learning": Preset(LEARNING_ENV, LEARNING_AGENT),
    "deployment": Preset(DEPLOYMENT_ENV, DEPLOYMENT_AGENT),
}

# Observation noise is expressed in state-bin widths (0.1 m on the default grid).
OBS_NOISE_UNIT = 0.1


@dataclass
class TabularAgent:
    """Value table over (state code, action code) with a linear epsilon schedule."""

    q: np.ndarray
    visits: np.ndarray
    params: AgentParams = field(default_factory=AgentParams)
    env: EnvParams = field(default_factory=EnvParams)
    cfg: SymbolizerConfig = DEFAULT_CONFIG
    seed: int = 0

    @classmethod
    def create(cls, params: AgentParams = AgentParams(), env: EnvParams = EnvParams(),
               cfg: SymbolizerConfig = DEFAULT_CONFIG, seed: int = 0) -> "TabularAgent":
        shape = (cfg.n_state_symbols, cfg.n_action_symbols)
        return cls(np.full(shape, params.q_init), np.zeros(shape, dtype=np.int64), params, env, cfg, seed)

    def epsilon(self, t: int) -> float:
        p = self.params
        if p.eps_steps <= 0:
            return p.eps_end
        return max(p.eps_end, p.eps0 - (p.eps0 - p.eps_end) * t / p.eps_steps)

    def greedy(self, state_code: int) -> int:
        return int(np.argmax(self.q[state_code]))

    def policy_table(self) -> np.ndarray:
        return np.argmax(self.q, axis=1)

    def save(self, path) -> None:
        meta = {"agent": asdict(self.params), "env": asdict(self.env), "cfg": self.cfg.to_dict(),
                "seed": self.seed}
        with open(path, "wb") as fh:
            np.savez(fh, q=self.q, visits=self.visits, meta=np.array(json.dumps(meta, sort_keys=True)))

    @classmethod
    def load(cls, path) -> "TabularAgent":
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["meta"]))
            return cls(z["q"].copy(), z["visits"].copy(), AgentParams(**meta["agent"]),
                       EnvParams(**meta["env"]), SymbolizerConfig.from_dict(meta["cfg"]), meta["seed"])


@dataclass
class TransitionLog:
    """Columnar transition log; ``s_true``/``s_next_true`` are None when not tracked."""

    s: np.ndarray
    a: np.ndarray
    s_next: np.ndarray
    r: np.ndarray
    done: np.ndarray
    success: np.ndarray
    a_code: np.ndarray
    s_true: np.ndarray | None = None
    s_next_true: np.ndarray | None = None
    t0: int = 0

    def __len__(self) -> int:
        return len(self.a_code)

    def records(self):
        from .io_cli import TransitionRecord
        has_true = self.s_true is not None
        s, a, sn = self.s.tolist(), self.a.tolist(), self.s_next.tolist()
        st = self.s_true.tolist() if has_true else None
        snt = self.s_next_true.tolist() if has_true else None
        r, d = self.r.tolist(), self.done.tolist()
        for i in range(len(self)):
            yield TransitionRecord(
                t=self.t0 + i, s=tuple(s[i]), a=tuple(a[i]), s_next=tuple(sn[i]), r=r[i], done=bool(d[i]),
                s_true=tuple(st[i]) if has_true else None, s_next_true=tuple(snt[i]) if has_true else None,
            )

    def episode_lengths(self) -> np.ndarray:
        ends = np.flatnonzero(self.done)
        return np.diff(np.concatenate([[-1], ends]))


def _grid_arrays(cfg: SymbolizerConfig):
    centers = np.array([action_centers(c, cfg) for c in range(cfg.n_action_symbols)], dtype=float)
    return (centers, np.array(cfg.state_lo, dtype=float), np.array(cfg.state_hi, dtype=float),
            np.array(cfg.state_bins, dtype=np.int64))


def _targets(rng: np.random.Generator, n: int, env: EnvParams, dims: int) -> np.ndarray:
    g = rng.uniform(-env.target_range, env.target_range, size=(n, dims))
    return np.ascontiguousarray(np.clip(g, -env.bound, env.bound))


@dataclass
class TrainingResult:
    log: TransitionLog
    agent: TabularAgent


def run_training(seed: int, steps: int = 200_000, params: AgentParams | None = None,
                 env: EnvParams | None = None, cfg: SymbolizerConfig = DEFAULT_CONFIG,
                 preset: str = "learning") -> TrainingResult:
    """Epsilon-greedy one-step value learning; every transition is logged.

    The environment reward is -1 per step. The learner adds the bonus
    ``shaping * (shape_gamma * (D - d') - (D - d))`` from observed distances
    d, d' with ``D = shape_offset``. Unset ``params``/``env`` come from ``preset``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    params = PRESETS[preset].agent if params is None else params
    env = PRESETS[preset].env if env is None else env
    agent = TabularAgent.create(params, env, cfg, seed)
    rng = np.random.default_rng(seed)
    u = rng.random(steps)
    arand = rng.integers(0, cfg.n_action_symbols, size=steps, dtype=np.int64)
    targets = _targets(rng, steps + 1, env, cfg.dims)
    centers, lo, hi, nb = _grid_arrays(cfg)
    d = cfg.dims
    S, SN = np.zeros((steps, d)), np.zeros((steps, d))
    A = np.zeros(steps, dtype=np.int64)
    D, SUCC = np.zeros(steps, dtype=np.uint8), np.zeros(steps, dtype=np.uint8)
    _core.kernels().train_loop(
        agent.q, agent.visits, u, arand, targets, centers, lo, hi, nb,
        float(env.step_scale), float(env.bound), float(env.success_radius), int(env.max_steps),
        float(params.eps0), float(params.eps_end), int(params.eps_steps), float(params.alpha),
        float(params.alpha_min), float(params.gamma), float(params.shaping), float(params.shape_gamma),
        float(params.shape_offset), S, A, SN, D, SUCC,
    )
    log = TransitionLog(S, centers[A], SN, np.full(steps, -1.0), D.astype(bool), SUCC.astype(bool), A)
    return TrainingResult(log, agent)


def run_deployment(seed: int, agent: TabularAgent, steps: int = 20_000,
                   spec: NoiseSpec = NoiseSpec(), env: EnvParams | None = None) -> TransitionLog:
    """Frozen greedy rollout; noise corrupts the chosen channel from ``spec.onset``.

    Logged actions are the policy's commands; the true (noise-free) states are
    logged alongside the observed ones.
    """
    env = agent.env if env is None else env
    cfg = agent.cfg
    rng = np.random.default_rng(seed)
    targets = _targets(rng, steps + 1, env, cfg.dims)
    noise = rng.standard_normal((steps, cfg.dims))
    rnoise = rng.standard_normal((steps, cfg.dims))
    centers, lo, hi, nb = _grid_arrays(cfg)
    d = cfg.dims
    S, SN, ST, SNT = (np.zeros((steps, d)) for _ in range(4))
    A = np.zeros(steps, dtype=np.int64)
    D, SUCC = np.zeros(steps, dtype=np.uint8), np.zeros(steps, dtype=np.uint8)
    _core.kernels().deploy_loop(
        np.ascontiguousarray(agent.q, dtype=float), targets, centers, lo, hi, nb,
        float(env.step_scale), float(env.bound), float(env.success_radius), int(env.max_steps),
        _CHANNEL_CODE[spec.channel], float(spec.sd), int(spec.onset), noise, rnoise,
        S, A, SN, ST, SNT, D, SUCC,
    )
    return TransitionLog(S, centers[A], SN, np.full(steps, -1.0), D.astype(bool), SUCC.astype(bool), A, ST, SNT)


def deployment_noise(fault: str | None, sigma2: float, onset: int = 10_000) -> NoiseSpec:
    """NoiseSpec for a named fault: 'obs' (bin-width units), 'act' (action units) or none."""
    if fault in (None, "none") or sigma2 == 0:
        return NoiseSpec(None, 0.0, onset)
    if fault in ("obs", OBSERVATION):
        return NoiseSpec(OBSERVATION, sigma2, onset, OBS_NOISE_UNIT)
    if fault in ("act", ACTION):
        return NoiseSpec(ACTION, sigma2, onset, 1.0)
    raise ValueError(f"unknown fault {fault!r}")


def train_agent(seed: int, steps: int = 200_000, preset: str = "deployment") -> TabularAgent:
    return run_training(seed, steps, preset=preset).agent


def evaluate_success(agent: TabularAgent, episodes: int = 500, seed: int = 0) -> float:
    """Fraction of greedy episodes that reach the target before the step limit."""
    env = agent.env
    rng = np.random.default_rng(seed)
    targets = _targets(rng, episodes, env, agent.cfg.dims)
    centers, lo, hi, nb = _grid_arrays(agent.cfg)
    policy = agent.policy_table()
    wins = 0
    for g in targets:
        e = ReachEnv(env.step_scale, env.bound, env.success_radius, env.max_steps)
        obs = e.reset(g)
        done = False
        while not done:
            obs, _, done = env_step(e, centers[policy[symbolize_state(obs, agent.cfg)]])
        wins += e.distance() < env.success_radius
    return wins / episodes


__all__ = [
    "ReachEnv", "env_step", "NoiseSpec", "inject_noise", "EnvParams", "AgentParams", "TabularAgent",
    "TransitionLog", "TrainingResult", "run_training", "run_deployment", "deployment_noise",
    "train_agent", "evaluate_success", "Preset", "LEARNING_ENV", "LEARNING_AGENT", "DEPLOYMENT_ENV",
    "DEPLOYMENT_AGENT", "PRESETS", "OBS_NOISE_UNIT",
]
