"""Instance pack shared by the acceptance and pipeline tests."""

from approxgroups.instances import Instance


def _inst(group, set_spec, seed=None):
    return Instance(group=group, set=set_spec, seed=seed)


CYC = lambda n: {"kind": "cyclic", "params": {"n": n}}
PROD = lambda *f: {"kind": "product", "params": {"factors": list(f)}}

PACK = {
    "interval-c256": _inst(CYC(256), {"interval": {"lo": -16, "hi": 16}}),
    "interval-c512": _inst(CYC(512), {"interval": {"lo": -24, "hi": 24}}),
    "cosets-c64xc3": _inst(PROD(CYC(64), CYC(3)), {"coset_union": {
        "subgroup_generators": [[8, 0]], "coset_reps": [[0, 0], [1, 1], [63, 2]]}}),
    "cosets-c512xc3": _inst(PROD(CYC(512), CYC(3)), {"coset_union": {
        "subgroup_generators": [[32, 1]], "coset_reps": [[0, 0], [1, 0], [511, 0]]}}),
    "heis3-ball1": _inst({"kind": "heisenberg", "params": {"p": 3}}, {"ball": {"radius": 1}}),
    "heis5-ball2": _inst({"kind": "heisenberg", "params": {"p": 5}}, {"ball": {"radius": 2}}),
    "dihedral16-ball2": _inst({"kind": "dihedral", "params": {"n": 16}}, {"ball": {"radius": 2}}),
    "sym5-random": _inst({"kind": "symmetric", "params": {"n": 5}},
                         {"random_symmetric": {"size": 15, "seed": 7}}, seed=7),
}

# subgroups: chains must stop at once with H = A and index 1 in <A>
SUBGROUPS = {
    "c12-order4": _inst(CYC(12), {"elements": [0, 3, 6, 9]}),
    "c64xc3-coset-subgroup": _inst(PROD(CYC(64), CYC(3)), {"coset_union": {
        "subgroup_generators": [[8, 0]], "coset_reps": [[0, 0]]}}),
    "sym3-whole": _inst({"kind": "symmetric", "params": {"n": 3}}, {"elements": [0, 1, 2, 3, 4, 5]}),
    "dihedral8-rotations": _inst({"kind": "dihedral", "params": {"n": 8}}, {"elements": list(range(8))}),
}


def build(name):
    table = PACK if name in PACK else SUBGROUPS
    return table[name].build()
