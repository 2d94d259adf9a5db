#include <catch2/catch_amalgamated.hpp>

#include "gmpc/crypto/commitment.hpp"
#include "gmpc/crypto/ecss.hpp"
#include "gmpc/crypto/fhe.hpp"
#include "gmpc/crypto/merkle.hpp"
#include "gmpc/crypto/prg.hpp"
#include "gmpc/crypto/shamir.hpp"
#include "gmpc/crypto/signature.hpp"
#include "gmpc/experiments/stats.hpp"
#include "gmpc/field.hpp"
#include "gmpc/rng.hpp"
#include "gmpc/serialize.hpp"
#include "gmpc/sha256.hpp"

using namespace gmpc;

TEST_CASE("sha256 matches published test vectors") {
    CHECK(hex(digest_bytes(sha256(to_bytes("abc")))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hex(digest_bytes(sha256(Bytes{}))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // Multi-block input (exceeds one 64-byte block).
    CHECK(hex(digest_bytes(sha256(to_bytes(
              "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")))) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("tagged hashes separate domains") {
    Bytes m = to_bytes("payload");
    CHECK(tagged_hash("a", m) != tagged_hash("b", m));
    CHECK(tagged_hash("a", m) != sha256(m));
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c = Rng(42).fork("left"), d = Rng(42).fork("right");
    CHECK(c.next_u64() != d.next_u64());
    // Fork result does not depend on parent's consumed randomness.
    Rng p1(7), p2(7);
    p2.next_u64();
    CHECK(p1.fork("x").next_u64() == p2.fork("x").next_u64());
}

TEST_CASE("rng below is unbiased across small moduli") {
    Rng rng(11);
    std::vector<std::uint64_t> counts(7, 0);
    const std::uint64_t trials = 70000;
    for (std::uint64_t i = 0; i < trials; ++i) counts[rng.below(7)]++;
    std::vector<double> expected(7, double(trials) / 7);
    double p = chi2_pvalue(chi2_statistic(counts, expected), 6);
    CHECK(p > 0.001);
}

TEST_CASE("field arithmetic satisfies ring identities") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        Fp a = Fp::random(rng), b = Fp::random(rng), c = Fp::random(rng);
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a - b) + b == a);
        if (a != Fp(0)) CHECK(a * a.inv() == Fp(1));
    }
    CHECK(Fp(Fp::P) == Fp(0));
    CHECK(Fp(Fp::P - 1) + Fp(1) == Fp(0));
    CHECK(Fp(Fp::P - 1) * Fp(Fp::P - 1) == Fp(1));
}

TEST_CASE("byte packing round-trips") {
    Rng rng(9);
    for (std::size_t len : {0u, 1u, 6u, 7u, 8u, 20u, 61u, 200u}) {
        Bytes data = rng.bytes(len);
        CHECK(unpack_bytes(pack_bytes(data)) == data);
    }
}

TEST_CASE("serializer round-trips and rejects truncation") {
    Writer w;
    w.u8(7);
    w.u32(0xdeadbeef);
    w.u64(0x0123456789abcdefull);
    w.blob(to_bytes("hello"));
    w.fp(Fp(123456789));
    Bytes buf = w.take();
    Reader r(buf);
    CHECK(r.u8() == 7);
    CHECK(r.u32() == 0xdeadbeef);
    CHECK(r.u64() == 0x0123456789abcdefull);
    CHECK(r.blob() == to_bytes("hello"));
    CHECK(r.fp() == Fp(123456789));
    CHECK(r.done());
    Bytes cut(buf.begin(), buf.begin() + 3);
    Reader r2(cut);
    r2.u8();
    CHECK_THROWS_AS(r2.u32(), std::out_of_range);
}

TEST_CASE("shamir reconstructs from any t+1 shares") {
    Rng rng(100);
    for (std::uint32_t n_s : {3u, 7u, 16u}) {
        std::uint32_t t = (n_s - 1) / 2;
        Fp secret = Fp::random(rng);
        ShareVector shares = shamir_share(secret, n_s, t, rng);
        // Random (t+1)-subsets.
        for (int rep = 0; rep < 10; ++rep) {
            auto idx = rng.sample_distinct(t + 1, n_s);
            ShareVector sub;
            for (auto i : idx) sub.push_back(shares[i]);
            CHECK(shamir_recon(sub, t) == secret);
        }
    }
}

TEST_CASE("shamir t shares are statistically independent of the secret") {
    // Fix two very different secrets; the marginal distribution of any t
    // shares must match. Chi-square over bucketed share values.
    Rng rng(200);
    const std::uint32_t n_s = 5, t = 2;
    const int trials = 4000, buckets = 8;
    std::vector<std::uint64_t> c0(buckets, 0), c1(buckets, 0);
    for (int i = 0; i < trials; ++i) {
        ShareVector sa = shamir_share(Fp(0), n_s, t, rng);
        ShareVector sb = shamir_share(Fp(Fp::P - 1), n_s, t, rng);
        c0[sa[1].value.value() % buckets]++;
        c1[sb[1].value.value() % buckets]++;
    }
    std::vector<double> expected(buckets, double(trials) / buckets);
    CHECK(chi2_pvalue(chi2_statistic(c0, expected), buckets - 1) > 0.001);
    CHECK(chi2_pvalue(chi2_statistic(c1, expected), buckets - 1) > 0.001);
}

TEST_CASE("shamir byte sharing round-trips") {
    Rng rng(300);
    Bytes msg = rng.bytes(100);
    auto holder = shamir_share_bytes(msg, 7, 2, rng);
    std::vector<std::pair<std::uint32_t, Bytes>> subset = {
        {3, holder[2]}, {5, holder[4]}, {7, holder[6]}};
    CHECK(shamir_recon_bytes(subset, 2) == msg);
}

// Independent decoding oracle: try every k-subset of share positions,
// interpolate, and accept the first candidate consistent with >= m - e
// shares. Exponential, only usable at toy sizes — which is the point: it
// cross-checks the linear-algebra decoder through a different algorithm.
static std::optional<Fp> brute_force_rs_recon(const ShareVector& shares, std::uint32_t t,
                                              std::uint32_t e_max) {
    std::uint32_t m = std::uint32_t(shares.size()), k = t + 1;
    std::vector<std::uint32_t> pick(k);
    std::function<std::optional<Fp>(std::uint32_t, std::uint32_t)> rec =
        [&](std::uint32_t from, std::uint32_t depth) -> std::optional<Fp> {
        if (depth == k) {
            std::vector<std::pair<Fp, Fp>> pts;
            for (auto i : pick) pts.push_back({Fp(shares[i].index), shares[i].value});
            Poly f = poly_interpolate(pts);
            std::uint32_t bad = 0;
            for (const Share& s : shares)
                if (poly_eval(f, Fp(s.index)) != s.value) ++bad;
            if (bad <= e_max) return poly_eval(f, Fp(0));
            return std::nullopt;
        }
        for (std::uint32_t i = from; i + (k - depth) <= m; ++i) {
            pick[depth] = i;
            if (auto r = rec(i + 1, depth + 1)) return r;
        }
        return std::nullopt;
    };
    return rec(0, 0);
}

TEST_CASE("ecss corrects up to t wrong shares (exhaustive small sizes)") {
    Rng rng(400);
    for (std::uint32_t n_s : {4u, 7u, 8u}) {
        for (std::uint32_t t = 0; 3 * t < n_s - 2; ++t) { // t < n_s/3 range incl. t=0
            if (3 * (t + 1) <= n_s) { /* keep t strictly below n_s/3 */ }
            Fp secret = Fp::random(rng);
            ShareVector shares = ecss_share(secret, n_s, t, rng);
            // All error patterns with 1..t corrupted positions.
            std::vector<std::uint32_t> marks(n_s, 0);
            std::function<void(std::uint32_t, std::uint32_t)> visit =
                [&](std::uint32_t from, std::uint32_t left) {
                if (left == 0) {
                    ShareVector corrupted = shares;
                    for (std::uint32_t i = 0; i < n_s; ++i)
                        if (marks[i]) corrupted[i].value += Fp(1 + i);
                    auto got = ecss_recon(corrupted, t);
                    REQUIRE(got.has_value());
                    CHECK(*got == secret);
                    auto oracle = brute_force_rs_recon(corrupted, t, t);
                    REQUIRE(oracle.has_value());
                    CHECK(*oracle == secret);
                    return;
                }
                for (std::uint32_t i = from; i + left <= n_s; ++i) {
                    marks[i] = 1;
                    visit(i + 1, left - 1);
                    marks[i] = 0;
                }
            };
            for (std::uint32_t errs = 0; errs <= t; ++errs) visit(0, errs);
        }
    }
}

TEST_CASE("ecss byte sharing survives corrupted holders") {
    Rng rng(500);
    Bytes msg = rng.bytes(64);
    const std::uint32_t n_s = 10, t = 3; // t < n_s/3
    auto holder = ecss_share_bytes(msg, n_s, t, rng);
    std::vector<std::pair<std::uint32_t, Bytes>> all;
    for (std::uint32_t i = 0; i < n_s; ++i) all.push_back({i + 1, holder[i]});
    // Corrupt three holders' share streams entirely.
    all[0].second = rng.bytes(all[0].second.size());
    all[4].second = rng.bytes(all[4].second.size());
    all[9].second = rng.bytes(all[9].second.size());
    auto got = ecss_recon_bytes(all, t);
    REQUIRE(got.has_value());
    CHECK(*got == msg);
}

TEST_CASE("vector commitment verifies honest openings and binds positions") {
    Rng rng(600);
    const std::uint32_t size = 13;
    std::vector<Bytes> values;
    for (std::uint32_t i = 0; i < size; ++i) values.push_back(rng.bytes(5 + i));
    VcParams pp = vc_setup(size);
    auto [aux, c] = vc_commit(pp, values, rng);
    auto openings = vc_open(aux, {0, 5, 12});
    CHECK(vc_verify(pp, c, openings));
    // Any altered value under the same proof must fail.
    for (std::size_t which = 0; which < openings.size(); ++which) {
        auto tampered = openings;
        tampered[which].value.push_back(0x00);
        CHECK_FALSE(vc_verify(pp, c, tampered));
        auto flipped = openings;
        flipped[which].value[0] ^= 1;
        CHECK_FALSE(vc_verify(pp, c, flipped));
        auto moved = openings;
        moved[which].index = (moved[which].index + 1) % size;
        CHECK_FALSE(vc_verify(pp, c, moved));
    }
    // Opening codec round-trip.
    Writer w;
    write_opening(w, openings[1]);
    Bytes buf = w.take();
    Reader r(buf);
    VcOpening back = read_opening(r);
    CHECK(vc_verify_one(pp, c, back));
}

TEST_CASE("commitment hides and binds") {
    Rng rng(700);
    auto [c, open] = commit(to_bytes("secret-value"), rng);
    CHECK(commit_verify(c, open));
    CommitOpening bad = open;
    bad.message = to_bytes("secret-valuf");
    CHECK_FALSE(commit_verify(c, bad));
    // Same message, fresh salt -> different commitment string.
    auto [c2, open2] = commit(to_bytes("secret-value"), rng);
    CHECK(c != c2);
    CHECK(commit_verify(c2, open2));
}

TEST_CASE("signatures verify and reject forgeries") {
    Rng rng(800);
    SigKeypair kp = sig_gen(rng, 8);
    Bytes msg = to_bytes("committee 3 nonce 0xabcd");
    Signature sig = sig_sign(kp.sk, msg);
    CHECK(sig_verify(kp.pk, msg, sig));
    // Different message under the same signature.
    CHECK_FALSE(sig_verify(kp.pk, to_bytes("committee 3 nonce 0xabce"), sig));
    // Tampered signature parts.
    Signature s2 = sig_sign_leaf(kp.sk, msg, 3);
    CHECK(sig_verify(kp.pk, msg, s2));
    s2.revealed[5][0] ^= 1;
    CHECK_FALSE(sig_verify(kp.pk, msg, s2));
    Signature s3 = sig_sign_leaf(kp.sk, msg, 4);
    s3.copath[0][0] ^= 1;
    CHECK_FALSE(sig_verify(kp.pk, msg, s3));
    // Wrong key.
    SigKeypair other = sig_gen(rng, 8);
    CHECK_FALSE(sig_verify(other.pk, msg, sig));
    // Leaf out of capacity.
    Signature s4 = sig_sign_leaf(kp.sk, msg, 7);
    s4.leaf = 8;
    CHECK_FALSE(sig_verify(kp.pk, msg, s4));
    // Codec round-trip.
    Writer w;
    write_signature(w, sig);
    Bytes buf = w.take();
    Reader r(buf);
    Signature back = read_signature(r);
    CHECK(sig_verify(kp.pk, msg, back));
}

TEST_CASE("signature public key serialization round-trips") {
    Rng rng(850);
    SigKeypair kp = sig_gen(rng, 4);
    SigPublicKey pk2 = SigPublicKey::deserialize(kp.pk.serialize());
    Bytes msg = to_bytes("x");
    CHECK(sig_verify(pk2, msg, sig_sign(kp.sk, msg)));
}

TEST_CASE("prg expansion is deterministic with distinct blocks") {
    Bytes seed = pack_bits({1, 0, 1, 1, 0, 0, 1, 0, 1});
    auto blocks = prg_expand(seed, 5, 40);
    auto again = prg_expand(seed, 5, 40);
    CHECK(blocks == again);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        CHECK(blocks[i].size() == 40);
        for (std::size_t j = i + 1; j < blocks.size(); ++j) CHECK(blocks[i] != blocks[j]);
    }
    Bytes seed2 = pack_bits({1, 0, 1, 1, 0, 0, 1, 0, 0});
    CHECK(prg_expand(seed2, 5, 40) != blocks);
}

TEST_CASE("fhe decrypts what eval computes") {
    Rng rng(900);
    FheKeypair kp = fhe_gen(rng);
    FheCircuit xor_all{"xor-all", [](const std::vector<Bytes>& in) {
                           Bytes out(in.at(0).size(), 0);
                           for (const Bytes& b : in)
                               for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= b[i];
                           return out;
                       }};
    Bytes m1 = rng.bytes(16), m2 = rng.bytes(16), m3 = rng.bytes(16);
    std::vector<Bytes> cts = {fhe_enc(kp.pk, m1, rng), fhe_enc(kp.pk, m2, rng),
                              fhe_enc(kp.pk, m3, rng)};
    Bytes rho = rng.bytes(8);
    auto ct_out = fhe_eval(kp.pk, xor_all, cts, rho);
    REQUIRE(ct_out.has_value());
    auto m_out = fhe_dec(kp.sk, *ct_out);
    REQUIRE(m_out.has_value());
    CHECK(*m_out == xor_all.eval({m1, m2, m3}));

    SECTION("decryption under a wrong key fails") {
        FheKeypair other = fhe_gen(rng);
        CHECK_FALSE(fhe_dec(other.sk, *ct_out).has_value());
    }
    SECTION("evaluation is deterministic in (pk, circuit, inputs, rho)") {
        auto ct_again = fhe_eval(kp.pk, xor_all, cts, rho);
        REQUIRE(ct_again.has_value());
        CHECK(*ct_again == *ct_out);
        auto ct_diff = fhe_eval(kp.pk, xor_all, cts, rng.bytes(8));
        REQUIRE(ct_diff.has_value());
        CHECK(*ct_diff != *ct_out); // different randomness, different trace
    }
    SECTION("encryption is randomized") {
        CHECK(fhe_enc(kp.pk, m1, rng) != cts[0]);
    }
    SECTION("inputs bound to another key are rejected") {
        FheKeypair other = fhe_gen(rng);
        std::vector<Bytes> mixed = cts;
        mixed[1] = fhe_enc(other.pk, m2, rng);
        CHECK_FALSE(fhe_eval(kp.pk, xor_all, mixed, rho).has_value());
    }
}

TEST_CASE("chi-square p-values match reference quantiles") {
    // Classic table entries: P[chi2_1 > 3.841] = 0.05, P[chi2_23 > 35.172] = 0.05.
    CHECK(chi2_pvalue(3.841, 1) == Catch::Approx(0.05).margin(0.001));
    CHECK(chi2_pvalue(35.172, 23) == Catch::Approx(0.05).margin(0.001));
    CHECK(chi2_pvalue(0.0, 10) == Catch::Approx(1.0));
    CHECK(chi2_pvalue(200.0, 10) < 1e-6);
}

TEST_CASE("power fit recovers a planted exponent") {
    std::vector<double> x = {8, 10, 12, 14}, y;
    for (double v : x) y.push_back(2.5 * std::pow(v, 3.0));
    PowerFit fit = fit_power(x, y);
    CHECK(fit.exponent == Catch::Approx(3.0).margin(1e-6));
    CHECK(fit.scale == Catch::Approx(2.5).margin(1e-6));
    CHECK(fit.max_residual < 1e-9);
}
