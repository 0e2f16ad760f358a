from typing import Optional, Sequence


class RunConfig:
    """Config holder for one run of the equitangent command line
    """
    def __init__(self, command: str, input_path: Optional[str], out: Optional[str],
                 tol: float, step: float, seed: int, count: int,
                 n: Optional[int], verbose: bool,
                 family_s: float = 0.0, from_framed: bool = False,
                 bigon: bool = False, state: Optional[Sequence[float]] = None, full_check: bool = False,
                 T: Optional[float] = None, steps: int = 10000, clock: str = 'reparameterized',
                 halving: bool = False, shift: int = 1, max_periods: float = 2.0, perturb: float = 0.0,
                 bound: int = 10, R: Optional[float] = None, r: Optional[float] = None, d: float = 0.0,
                 starts: int = 10, corner_radius: float = 0.02, side_radius: float = 100.0,
                 samples: int = 1000):
        """
        Args:
            command (str): Subcommand name
            input_path (str): Path to the instance file, None to use a generated instance
            out (str): Output path for the JSON/CSV/SVG result, None for stdout
            tol (float): Absolute tolerance of geometric residuals
            step (float): Step size of flow-composition brackets
            seed (int): Seed of every random instance
            count (int): Number of random instances
            n (int): Number of vertices / circles
            verbose (bool): Debug logging
            family_s (float): Parameter of the even-n framing family
            from_framed (bool): Input is a framed polygon to be turned into a chain
            bigon (bool): Certify the bigon distribution instead of chains
            state (Sequence[float]): Bigon state p, q, r, alpha, phi
            full_check (bool): Also run the kernel cross-check of the singular-curve test
            T (float): Flow duration; None for one regular period
            steps (int): RK4 steps
            clock (str): Flow clock, reparameterized or unit
            halving (bool): Verify the trajectory by step halving
            shift (int): Cyclic shift of the monodromy target
            max_periods (float): Monodromy search horizon in regular periods
            perturb (float): Size of the random perturbation of the regular polygon
            bound (int): Coefficient bound of the independence scan
            R (float): Outer radius of the bicentric pair; None to solve for it
            r (float): Inner radius of the bicentric pair
            d (float): Distance between the centers of the bicentric pair
            starts (int): Number of Poncelet starting points
            corner_radius (float): Radius of the corner arcs of the smoothed n-gon
            side_radius (float): Radius of the side arcs of the smoothed n-gon
            samples (int): Number of samples along the equitangent locus
        """
        self.command = command
        self.input_path = input_path
        self.out = out
        self.tol = tol
        self.step = step
        self.seed = seed
        self.count = count
        self.n = n
        self.verbose = verbose
        self.family_s = family_s
        self.from_framed = from_framed
        self.bigon = bigon
        self.state = list(state) if state is not None else None
        self.full_check = full_check
        self.T = T
        self.steps = steps
        self.clock = clock
        self.halving = halving
        self.shift = shift
        self.max_periods = max_periods
        self.perturb = perturb
        self.bound = bound
        self.R = R
        self.r = r
        self.d = d
        self.starts = starts
        self.corner_radius = corner_radius
        self.side_radius = side_radius
        self.samples = samples

    def __str__(self) -> str:
        s = f"\nParameters:\n{'run':-^20}\n{self.command=}\n{self.input_path=}\n{self.out=}\n{self.n=}\n\n" +\
        f"{'numerics':-^20}\n" +\
        f"{self.tol=}\n{self.step=}\n{self.seed=}\n{self.count=}\n" +\
        f"{self.T=}\n{self.steps=}\n{self.clock=}\n{self.halving=}\n" +\
        f"{'command':-^20}\n" +\
        f"{self.family_s=}\n{self.from_framed=}\n{self.bigon=}\n{self.state=}\n{self.full_check=}\n" +\
        f"{self.shift=}\n{self.max_periods=}\n{self.perturb=}\n{self.bound=}\n" +\
        f"{self.R=}\n{self.r=}\n{self.d=}\n{self.starts=}\n" +\
        f"{self.corner_radius=}\n{self.side_radius=}\n{self.samples=}\n"
        return s.replace("self.", "")
