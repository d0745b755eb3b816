import pytest

from fxacc.cipher import (
    CipherPair, Ciphertext, IntegrityError, KeyContext, NonceStream, Origin, parse_sealed,
    random_key,
)
from fxacc.words import M32, join64


@pytest.fixture(scope="module")
def ctx():
    return KeyContext()


def test_roundtrip_word(ctx):
    nonces = NonceStream(1)
    for x in (0, 1, 0x7FFF_FFFF, 0x8000_0000, M32):
        c = ctx.encrypt(x, Origin.RUNTIME, nonces)
        assert ctx.decrypt_word(c) == x
    assert ctx.decrypt(ctx.encrypt(M32, Origin.RUNTIME, nonces)) == -1


def test_same_value_different_ciphertexts(ctx):
    nonces = NonceStream(2)
    a = ctx.encrypt(5, Origin.RUNTIME, nonces)
    b = ctx.encrypt(5, Origin.RUNTIME, nonces)
    assert a.payload != b.payload


def test_origins_never_collide(ctx):
    # same nonce stream state, same value: the origin bit still separates them
    c = ctx.encrypt(9, Origin.CONSTANT, NonceStream(3))
    r = ctx.encrypt(9, Origin.RUNTIME, NonceStream(3))
    assert c.payload != r.payload
    assert ctx.nonce_of(c) >> 63 == 1
    assert ctx.nonce_of(r) >> 63 == 0


def test_origin_tag_checked(ctx):
    c = ctx.encrypt(4, Origin.CONSTANT, NonceStream(4))
    forged = Ciphertext(c.payload, Origin.RUNTIME)
    with pytest.raises(IntegrityError):
        ctx.decrypt_word(forged)


def test_wrong_key_rejected():
    c = KeyContext(random_key()).encrypt(1, Origin.RUNTIME, NonceStream(5))
    with pytest.raises(IntegrityError):
        KeyContext(random_key()).decrypt_word(c)


def test_serialize_roundtrip(ctx):
    nonces = NonceStream(6)
    c = ctx.encrypt(77, Origin.CONSTANT, nonces)
    assert Ciphertext.parse(c.serialize()) == c
    p = ctx.encrypt_pair(join64(1, 2), Origin.RUNTIME, nonces)
    assert parse_sealed(p.serialize()) == p
    assert ctx.decrypt_pair(p) == join64(1, 2)
    with pytest.raises(IntegrityError):
        Ciphertext.parse("@@@R")


def test_ops_fused_forms(ctx):
    ops = ctx.ops(NonceStream(7))
    n = NonceStream(8)

    def E(x, w=1):
        return ctx.seal(x, w, Origin.CONSTANT, n)

    def R(x, w=1):
        return ctx.seal(x, w, Origin.RUNTIME, n)

    # (a - k1) * (b - k2) + k0
    out = ops.fused("mul", R(10 + 3), R(4 + 5), E(100), E(3), E(5))
    assert ctx.open(out) == 140
    assert out.origin is Origin.RUNTIME
    assert ctx.open(ops.alu("add", R(2), R(3), E(10))) == 15
    assert ctx.open(ops.alu("sub", R(2), R(3), E(10))) == 9
    assert ctx.open(ops.offset(R(join64(1, 1), 2), E(join64(M32, 2), 2))) == join64(0, 3)
    assert ctx.open(ops.unary("neg", R(7 + 1), E(0), E(1))) == (-7) & M32
    assert ctx.open(ops.load_const(E(42))) == 42


def test_ops_branch_polarity(ctx):
    ops = ctx.ops()
    n = NonceStream(9)
    a = ctx.seal(5, 1, Origin.RUNTIME, n)
    b = ctx.seal(3, 1, Origin.RUNTIME, n)
    k = ctx.seal(2, 1, Origin.CONSTANT, n)
    truth = ctx.seal(0x1234, 1, Origin.CONSTANT, n)
    liar = ctx.seal(0x1235, 1, Origin.CONSTANT, n)
    assert ops.branch("eq", "s", a, b, (k, truth))
    assert not ops.branch("eq", "s", a, b, (k, liar))
    z = ctx.seal(0, 1, Origin.CONSTANT, n)
    assert ops.branch("gt", "s", a, b, (z, z, truth))
    assert not ops.branch("gt", "s", a, b, (z, z, liar))


def test_address_handles_are_injective(ctx):
    n = NonceStream(10)
    seen = {ctx.addr_handle(ctx.encrypt(a, Origin.RUNTIME, n)).handle for a in range(2000)}
    assert len(seen) == 2000


def test_nonce_stream_seeded():
    assert [NonceStream(11).next() for _ in range(3)] == [NonceStream(11).next() for _ in range(3)]
    s = NonceStream(11)
    assert s.next() != s.next()


def test_pair_origin():
    ctx = KeyContext()
    p = ctx.encrypt_pair(3, Origin.CONSTANT, NonceStream(1))
    assert isinstance(p, CipherPair) and p.origin is Origin.CONSTANT
