# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The reqrnn Authors
"""Reference Philox4x32-10 and the draw helpers layered on it."""

M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK = 0xFFFFFFFF


def philox(ctr, key):
    c = list(ctr)
    k = list(key)
    for r in range(10):
        if r:
            k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
        p0 = M0 * c[0]
        p1 = M1 * c[2]
        c = [(p1 >> 32) ^ c[1] ^ k[0], p1 & MASK, (p0 >> 32) ^ c[3] ^ k[1], p0 & MASK]
    return c


class Rng:
    def __init__(self, seed, stream=0):
        self.seed, self.stream, self.counter, self.buf = seed, stream, 0, []

    def u32(self):
        if not self.buf:
            ctr = [self.counter & MASK, self.counter >> 32, self.stream & MASK, self.stream >> 32]
            self.buf = philox(ctr, [self.seed & MASK, self.seed >> 32])
            self.counter += 1
        return self.buf.pop(0)

    def u64(self):
        lo = self.u32()
        return (self.u32() << 32) | lo

    def uniform(self):
        return (self.u64() >> 11) * 2.0**-53

    def below(self, n):
        limit = 2**64 - 1 - ((2**64 - 1) % n)
        while True:
            x = self.u64()
            if x < limit:
                return x % n


# Published Random123 known-answer vectors.
assert philox([0, 0, 0, 0], [0, 0]) == [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]
assert philox([MASK] * 4, [MASK] * 2) == [0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD]
assert philox([0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344], [0xA4093822, 0x299F31D0]) == [
    0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1]

r = Rng(42, 7)
print("u32:", [hex(r.u32()) for _ in range(6)])
r = Rng(42, 7)
print("u64:", [hex(r.u64()) for _ in range(3)])
r = Rng(123, 0)
print("uniform:", [repr(r.uniform()) for _ in range(3)])
r = Rng(9, 1)
print("below10:", [r.below(10) for _ in range(10)])
r = Rng(5, 0)
items = list(range(10))
for i in range(len(items), 1, -1):
    j = r.below(i)
    items[i - 1], items[j] = items[j], items[i - 1]
print("shuffle:", items)
