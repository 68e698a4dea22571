import pytest


@pytest.fixture(scope="session")
def trees():
    """Session cache of supertile trees keyed by (rule, root, depth)."""
    from subtile.engine import SupertileTree
    from subtile.ruleset import builtin

    cache = {}

    def get(name, depth, root=0):
        key = (name, root, depth)
        if key not in cache:
            cache[key] = SupertileTree(builtin(name), root, depth)
        return cache[key]

    return get
