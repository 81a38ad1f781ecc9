"""Reference SplitMix64 / xoshiro256** / Lemire bounded draw / Fisher-Yates deal.

Written from the published reference algorithms, independent of the Rust
implementation. Output is frozen into tests/rng_vectors.rs.
"""

M64 = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return state, z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M64


class Xoshiro:
    def __init__(self, seed):
        s = []
        st = seed
        for _ in range(4):
            st, z = splitmix64(st)
            s.append(z)
        self.s = s

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & M64, 7) * 9) & M64
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def below(self, n):
        x = self.next()
        m = x * n
        lo = m & M64
        if lo < n:
            t = ((1 << 64) - n) % n
            while lo < t:
                x = self.next()
                m = x * n
                lo = m & M64
        return m >> 64


def canonical_deck():
    # (uid, face); faces ascending, golden is the last 11, jokers last
    deck = []
    for face in range(1, 12):
        for _ in range(face):
            deck.append(face)
    deck += [0, 0]
    return list(range(len(deck))), deck


def deal(seed):
    uids, faces = canonical_deck()
    rng = Xoshiro(seed)
    order = uids[:]
    for i in range(len(order) - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    hands = [[], [], [], []]
    for k, uid in enumerate(order):
        hands[k % 4].append(uid)
    return [sorted(h) for h in hands]


if __name__ == "__main__":
    st = 0
    out = []
    for _ in range(3):
        st, z = splitmix64(st)
        out.append(hex(z))
    print("splitmix64(0):", out)
    r = Xoshiro(42)
    print("xoshiro(42) first 4:", [hex(r.next()) for _ in range(4)])
    r = Xoshiro(7)
    print("below(7, 68) x8:", [r.below(68) for _ in range(8)])
    for seed in (42, 7):
        print("deal", seed, deal(seed))
