#include <vizpref/digest.hpp>
#include <vizpref/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <string>

using namespace vizpref;

TEST_CASE("sha256 matches the FIPS 180-4 vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // one block boundary: 64 'a's
    CHECK(sha256_hex(std::string(64, 'a')) ==
          "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
    CHECK(sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one-shot") {
    Sha256 h;
    h.update("hello ");
    h.update("world");
    CHECK(to_hex(h.finish()) == sha256_hex("hello world"));
}

TEST_CASE("shuffled_indices is a stable permutation") {
    auto a = shuffled_indices(100, 7);
    auto b = shuffled_indices(100, 7);
    auto c = shuffled_indices(100, 8);
    CHECK(a == b);
    CHECK(a != c);
    std::vector<bool> seen(100, false);
    for (std::size_t i : a) {
        REQUIRE(i < 100);
        REQUIRE(!seen[i]);
        seen[i] = true;
    }
}

TEST_CASE("hash64 is keyed and stable") {
    CHECK(hash64(1, "x") != hash64(2, "x"));
    CHECK(hash64(1, "x") != hash64(1, "y"));
    CHECK(hash64(1, "x") == hash64(1, "x"));
    double u = unit_from_hash(hash64(3, "pair-0|original"));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}
