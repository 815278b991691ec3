// Copyright 2026 The qecest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "dense.hpp"
#include "qecest/pauli.hpp"

namespace qecest {
namespace {

PauliOperator random_pauli(std::mt19937_64 &rng, int n) {
    std::uniform_int_distribution<uint64_t> idx(0, pauli_count(n) - 1);
    std::uniform_int_distribution<int> ph(0, 3);
    return PauliOperator::from_index(n, idx(rng)).with_phase(ph(rng));
}

TEST(Pauli, XTimesZIsMinusIY) {
    auto p = PauliOperator::from_string("X") * PauliOperator::from_string("Z");
    EXPECT_EQ(p, PauliOperator::from_string("-iY"));
}

TEST(Pauli, IdentityIsNeutral) {
    auto id = PauliOperator(2);
    for (uint64_t i = 0; i < pauli_count(2); i++) {
        auto p = PauliOperator::from_index(2, i);
        EXPECT_EQ(id * p, p);
        EXPECT_EQ(p * id, p);
    }
}

TEST(Pauli, TwoQubitProductMatchesDenseMatrices) {
    auto a = PauliOperator::from_string("XZ");
    auto b = PauliOperator::from_string("ZZ");
    auto c = a * b;
    EXPECT_EQ(c, PauliOperator::from_string("-iYI"));
    Eigen::MatrixXcd dense = testing::dense_pauli(a) * testing::dense_pauli(b);
    EXPECT_LT((dense - testing::dense_pauli(c)).norm(), 1e-12);
}

TEST(Pauli, ProductsMatchDenseOnRandomTriples) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; trial++) {
        int n = 1 + trial % 4;
        auto a = random_pauli(rng, n), b = random_pauli(rng, n);
        Eigen::MatrixXcd dense = testing::dense_pauli(a) * testing::dense_pauli(b);
        EXPECT_LT((dense - testing::dense_pauli(a * b)).norm(), 1e-12);
        bool dense_commute = (testing::dense_pauli(a) * testing::dense_pauli(b) -
                              testing::dense_pauli(b) * testing::dense_pauli(a))
                                 .norm() < 1e-12;
        EXPECT_EQ(commutes(a, b), dense_commute);
    }
}

TEST(Pauli, CommutationExamples) {
    EXPECT_FALSE(commutes(PauliOperator::from_string("X"), PauliOperator::from_string("Z")));
    EXPECT_TRUE(commutes(PauliOperator::from_string("X"), PauliOperator::from_string("X")));
    EXPECT_TRUE(commutes(PauliOperator::from_string("XX"), PauliOperator::from_string("ZZ")));
}

TEST(Pauli, Weight) {
    EXPECT_EQ(weight(PauliOperator::from_string("III")), 0);
    EXPECT_EQ(weight(PauliOperator::from_string("IXYZ")), 3);
    EXPECT_EQ(weight(PauliOperator::from_string("XXXXXXX")), 7);
}

TEST(Pauli, GroupProperties) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; trial++) {
        int n = 1 + trial % 7;
        auto a = random_pauli(rng, n), b = random_pauli(rng, n), c = random_pauli(rng, n);
        EXPECT_EQ((a * b) * c, a * (b * c));
        auto e = a * inverse(a);
        EXPECT_TRUE(e.is_identity_up_to_phase());
        EXPECT_EQ(e.phase_exp(), 0);
        EXPECT_EQ(commutes(a, b), commutes(b, a));
        EXPECT_LE(weight(a * b), weight(a) + weight(b));
    }
}

TEST(Pauli, IndexBijectionUpToSevenQubits) {
    for (int n = 1; n <= 7; n++) {
        std::set<std::string> seen;
        for (uint64_t i = 0; i < pauli_count(n); i++) {
            auto p = PauliOperator::from_index(n, i);
            ASSERT_EQ(p.index(), i);
            seen.insert(p.letters());
        }
        EXPECT_EQ(seen.size(), pauli_count(n));
    }
}

TEST(Pauli, CanonicalIndexDigits) {
    EXPECT_EQ(PauliOperator::from_string("XI").index(), 4u);
    EXPECT_EQ(PauliOperator::from_string("IZ").index(), 3u);
    EXPECT_EQ(PauliOperator::from_string("YZ").index(), 11u);
    EXPECT_EQ(index_digit(11, 2, 0), LETTER_Y);
    EXPECT_EQ(index_digit(11, 2, 1), LETTER_Z);
}

TEST(Pauli, StringRoundTrip) {
    const std::pair<const char *, const char *> cases[] = {
        {"IXYZ", "IXYZ"}, {"ZZZ", "ZZZ"}, {"-XY", "-XY"}, {"+iZ", "+iZ"}, {"-iYY", "-iYY"}, {"+XI", "XI"}};
    for (const auto &[in, out] : cases) EXPECT_EQ(PauliOperator::from_string(in).str(), out);
    EXPECT_EQ(PauliOperator::from_string("+1XZ").phase_exp(), 0);
    EXPECT_EQ(PauliOperator::from_string("-1XZ").phase_exp(), 2);
    EXPECT_EQ(PauliOperator::from_string("iXZ").phase_exp(), 1);
    std::ostringstream os;
    os << PauliOperator::from_string("-Z");
    EXPECT_EQ(os.str(), "-Z");
}

TEST(Pauli, UsageErrors) {
    EXPECT_THROW(PauliOperator::from_string("XQ"), UsageError);
    EXPECT_THROW(PauliOperator::from_string(""), UsageError);
    EXPECT_THROW(multiply(PauliOperator::from_string("X"), PauliOperator::from_string("XX")), UsageError);
    EXPECT_THROW(commutes(PauliOperator::from_string("X"), PauliOperator::from_string("XX")), UsageError);
    EXPECT_THROW(PauliOperator::from_index(2, 16), UsageError);
}

}  // namespace
}  // namespace qecest
