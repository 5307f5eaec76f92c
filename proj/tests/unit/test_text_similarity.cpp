#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biascheck/text_similarity.hpp"

using biascheck::metrics::token_similarity;

TEST_CASE("identical texts score exactly 1") {
    CHECK(token_similarity("the cat sat", "the cat sat") == 1.0);
    CHECK(token_similarity("One", "one") == 1.0);  // exact lowercase matching
    CHECK(token_similarity("A, b; c!", "a b c") == 1.0);
}

TEST_CASE("no shared tokens scores 0") {
    CHECK(token_similarity("alpha beta", "gamma delta") == 0.0);
    CHECK(token_similarity("", "anything") == 0.0);
    CHECK(token_similarity("anything", "") == 0.0);
    CHECK(token_similarity("", "") == 0.0);
}

TEST_CASE("prefix overlap: P=1, R=2/3, single chunk") {
    // matches=2, chunks=1, P=2/2, R=2/3 -> Fmean = 10*P*R/(R+9*P) = 20/29,
    // no fragmentation penalty for a single chunk.
    CHECK(token_similarity("the cat sat", "the cat") == doctest::Approx(20.0 / 29.0));
}

TEST_CASE("fragmented match pays the chunk penalty") {
    // "sat the cat": greedy alignment gives chunks {the cat}, {sat} -> 2 chunks
    // over 3 matches; P=R=1 so score = 1 - 0.5*(2/3)^3 = 23/27.
    CHECK(token_similarity("the cat sat", "sat the cat") == doctest::Approx(23.0 / 27.0));
}

TEST_CASE("fully scattered match") {
    // matches=3, chunks=3 (b interleaves), P=3/5, R=1.
    // Fmean = 10*(3/5)*1 / (1 + 9*3/5) = 6/6.4; penalty = 0.5.
    const double fmean = 10.0 * 0.6 * 1.0 / (1.0 + 9.0 * 0.6);
    CHECK(token_similarity("a b c", "a x b y c") == doctest::Approx(fmean * 0.5));
}

TEST_CASE("score is within [0, 1] on arbitrary inputs") {
    const char* samples[] = {"one two three four", "four three two one", "one one one",
                             "completely different words here", "one two", "two one two one"};
    for (const char* a : samples) {
        for (const char* b : samples) {
            const double s = token_similarity(a, b);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("duplicate tokens match up to the multiset minimum") {
    // "a a" vs "a": one match, P=1, R=1/2, single chunk.
    const double p = 1.0;
    const double r = 0.5;
    CHECK(token_similarity("a a", "a") == doctest::Approx(10.0 * p * r / (r + 9.0 * p)));
}
