# Copyright 2026 The bsid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference computations for the frozen test vectors.

Written from the construction definitions with hashlib/hmac only; the C++
tests assert the values printed here.
"""

import hashlib
import hmac
import struct

ZERO = bytes(32)


def prf(key, label):
    return hmac.new(key, label.encode(), hashlib.sha256).digest()


def prg(seed, n):
    out = b""
    counter = 0
    while len(out) < n:
        out += hashlib.sha256(seed + struct.pack(">I", counter)).digest()
        counter += 1
    return out[:n]


def split(stream, width, count):
    return [stream[i * width:(i + 1) * width] for i in range(count)]


def secondary_seeds(sk, m):
    return split(prg(prf(sk, "secondary-seeds"), 32 * m), 32, m)


def ephids(seed, set_index, n):
    return split(prg(prf(seed, "broadcast key %d" % set_index), 13 * n), 13, n)


def auth_tag(key, ephid):
    return hmac.new(key, ephid, hashlib.sha256).digest()[:13]


def chain(seed, length):
    keys = [None] * (length + 1)
    keys[length] = prf(seed, "tesla-chain")
    for i in range(length, 0, -1):
        keys[i - 1] = hashlib.sha256(keys[i]).digest()
    return keys


def merkle_root(leaves):
    hashed = [hashlib.sha256(b"\x00" + leaf).digest() for leaf in leaves]

    def node(level, index, width_at):
        if level == 0:
            return hashed[index]
        below = width_at[level - 1]
        left = node(level - 1, 2 * index, width_at)
        right = node(level - 1, min(2 * index + 1, below - 1), width_at)
        return hashlib.sha256(b"\x01" + left + right).digest()

    widths = [len(leaves)]
    while widths[-1] > 1:
        widths.append((widths[-1] + 1) // 2)
    return node(len(widths) - 1, 0, widths)


def main():
    print("prf_zero_broadcast_key", prf(ZERO, "broadcast key").hex())
    print("prg_zero_13", prg(ZERO, 13).hex())
    print("prg_zero_70", prg(ZERO, 70).hex())
    zero_ephid = bytes(13)
    print("auth_tag_zero", auth_tag(ZERO, zero_ephid).hex())
    seeds = secondary_seeds(ZERO, 100)
    print("secondary_seed_1", seeds[0].hex())
    print("secondary_seed_100", seeds[99].hex())
    ids = ephids(ZERO, 1, 3)
    for j, e in enumerate(ids):
        print("ephid_zero_set1_%d" % (j + 1), e.hex())
    print("baseline_ephid_zero_1",
          split(prg(prf(ZERO, "broadcast key"), 16 * 2), 16, 2)[0].hex())
    keys = chain(ZERO, 3)
    for i, k in enumerate(keys):
        print("chain_zero_3_k%d" % i, k.hex())
    print("toy_blind", (65 * pow(2, 17, 3233)) % 3233)
    for w in (1, 2, 3, 5, 8):
        leaves = [struct.pack(">I", i + 1) + bytes(16) for i in range(w)]
        print("merkle_root_%d" % w, merkle_root(leaves).hex())


if __name__ == "__main__":
    main()
