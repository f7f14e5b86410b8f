#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ledgerprint/sha256.hpp"

#include <string>

using namespace ledgerprint;

// NIST FIPS 180-4 test vectors.
TEST_CASE("sha256 matches the standard vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    CHECK(sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 block boundaries") {
    // 55/56/64 bytes straddle the padding split between one and two blocks.
    CHECK(sha256_hex(std::string(55, 'x')) != sha256_hex(std::string(56, 'x')));
    CHECK(sha256_hex(std::string(64, 'x')).size() == 64);
    for (char c : sha256_hex("boundary")) {
        const bool hex_digit = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        CHECK(hex_digit);
    }
}
