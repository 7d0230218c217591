from approxgroups.rng import XorShift64Star


def _reference(seed, count):
    # straight transcription of xorshift64* with explicit 64-bit wrapping
    x, out = seed, []
    for _ in range(count):
        x ^= x >> 12
        x = (x ^ (x << 25)) % 2 ** 64
        x ^= x >> 27
        out.append((x * 2685821657736338717) % 2 ** 64)
    return out


def test_matches_reference_stream():
    r = XorShift64Star(12345)
    assert [r.next_u64() for _ in range(50)] == _reference(12345, 50)


def test_seed_determinism_and_range():
    a, b = XorShift64Star(7), XorShift64Star(7)
    xs = [a.below(10) for _ in range(500)]
    assert xs == [b.below(10) for _ in range(500)]
    assert set(xs) == set(range(10))


def test_zero_seed_is_usable():
    r = XorShift64Star(0)
    assert len({r.next_u64() for _ in range(10)}) == 10
