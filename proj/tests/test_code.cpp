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

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dense.hpp"
#include "qecest/code.hpp"
#include "qecest/decoder.hpp"

namespace qecest {
namespace {

const StabilizerCode &steane() {
    static const StabilizerCode code = load_code_file(std::string(QECEST_DATA_DIR) + "/codes/steane.json");
    return code;
}

std::string validation_message(const std::string &json) {
    std::istringstream in(json);
    try {
        load_code(in);
    } catch (const ValidationError &e) {
        return e.what();
    }
    return "";
}

TEST(Code, LoadsSteane) {
    const auto &c = steane();
    EXPECT_EQ(c.n(), 7);
    EXPECT_EQ(c.k(), 1);
    EXPECT_EQ(c.d(), 3);
    EXPECT_EQ(c.stabilizers().size(), 6u);
    EXPECT_EQ(c.num_syndromes(), 64u);
    EXPECT_EQ(c.stabilizers()[0].str(), steane_code().stabilizers()[0].str());
}

TEST(Code, RejectsAnticommutingGenerators) {
    auto msg = validation_message(
        R"({"name":"bad","n":2,"k":0,"d":1,"stabilizers":["XI","ZI"],"logical_x":[],"logical_z":[]})");
    EXPECT_NE(msg.find("anticommuting generators"), std::string::npos) << msg;
    EXPECT_NE(msg.find("XI"), std::string::npos);
}

TEST(Code, RejectsLogicalEqualToGenerator) {
    auto msg = validation_message(
        R"({"name":"bad","n":7,"k":1,"d":3,
            "stabilizers":["XIXIXIX","IXXIIXX","IIIXXXX","ZIZIZIZ","IZZIIZZ","IIIZZZZ"],
            "logical_x":["XIXIXIX"],"logical_z":["ZZZZZZZ"]})");
    EXPECT_NE(msg.find("logical anticommutation check fails"), std::string::npos) << msg;
}

TEST(Code, DistinctValidationErrors) {
    auto dependent = validation_message(
        R"({"n":3,"k":1,"d":1,"stabilizers":["ZZI","ZZI"],"logical_x":["XXX"],"logical_z":["ZII"]})");
    EXPECT_NE(dependent.find("dependent generator"), std::string::npos) << dependent;
    auto outside = validation_message(
        R"({"n":3,"k":1,"d":1,"stabilizers":["ZZI","IZZ"],"logical_x":["XII"],"logical_z":["ZII"]})");
    EXPECT_NE(outside.find("outside the normalizer"), std::string::npos) << outside;
    EXPECT_NE(outside.find("XII"), std::string::npos);
    auto count = validation_message(
        R"({"n":3,"k":1,"d":1,"stabilizers":["ZZI"],"logical_x":["XXX"],"logical_z":["ZII"]})");
    EXPECT_NE(count.find("count mismatch"), std::string::npos) << count;
    auto missing = validation_message(R"({"n":3,"k":1})");
    EXPECT_NE(missing.find("missing field"), std::string::npos) << missing;
    EXPECT_NE(validation_message("{not json"), "");
}

TEST(Code, CodeJsonRoundTrip) {
    auto doc = code_to_json(steane());
    auto again = code_from_json(doc);
    EXPECT_EQ(again.stabilizers(), steane().stabilizers());
    EXPECT_EQ(again.logical_x(), steane().logical_x());
}

TEST(Code, PureErrorsFormSymplecticFrame) {
    const auto &c = steane();
    const auto &t = c.pure_errors();
    for (int i = 0; i < 6; i++) {
        for (int j = 0; j < 6; j++) {
            EXPECT_EQ(!commutes(t[i], c.stabilizers()[j]), i == j);
            EXPECT_TRUE(commutes(t[i], t[j]));
        }
        EXPECT_TRUE(commutes(t[i], c.logical_x()[0]));
        EXPECT_TRUE(commutes(t[i], c.logical_z()[0]));
    }
}

TEST(Syndrome, TrivialCases) {
    const auto &c = steane();
    EXPECT_EQ(syndrome_of(c, PauliOperator(7)), 0u);
    for (const auto &g : c.stabilizers()) EXPECT_EQ(syndrome_of(c, g), 0u);
    EXPECT_THROW(syndrome_of(c, PauliOperator(3)), UsageError);
}

TEST(Syndrome, MatchesDenseCommutators) {
    const auto &c = steane();
    auto x0 = PauliOperator::from_string("XIIIIII");
    Syndrome s = syndrome_of(c, x0);
    // X on qubit 0 anticommutes with the Z checks that touch qubit 0: ZIZIZIZ only.
    EXPECT_EQ(s, 1u << 3);
    auto bits = syndrome_bits(c, s);
    Eigen::MatrixXcd dx = testing::dense_pauli(x0);
    for (int i = 0; i < 6; i++) {
        Eigen::MatrixXcd dg = testing::dense_pauli(c.stabilizers()[i]);
        bool anti = (dx * dg + dg * dx).norm() < 1e-9;
        EXPECT_EQ(bits[i], anti);
    }
}

TEST(Syndrome, CosetsHaveEqualSize) {
    const auto &c = steane();
    std::vector<int> counts(64, 0);
    for (uint64_t i = 0; i < pauli_count(7); i++) counts[syndrome_of(c, PauliOperator::from_index(7, i))]++;
    for (int v : counts) EXPECT_EQ(v, 256);
}

TEST(Decompose, SimpleCases) {
    const auto &c = steane();
    auto d0 = decompose(c, PauliOperator(7));
    EXPECT_EQ(d0.logical_class(), LETTER_I);
    EXPECT_EQ(d0.stabilizer_mask, 0u);
    EXPECT_TRUE(d0.pure_error.is_identity_up_to_phase());
    auto dg = decompose(c, c.stabilizers()[2]);
    EXPECT_EQ(dg.logical_class(), LETTER_I);
    EXPECT_EQ(dg.stabilizer_mask, 1u << 2);
    EXPECT_TRUE(dg.pure_error.is_identity_up_to_phase());
    auto dl = decompose(c, c.logical_x()[0]);
    EXPECT_EQ(dl.logical_class(), LETTER_X);
    EXPECT_EQ(dl.stabilizer_mask, 0u);
}

TEST(Decompose, ReassemblesEveryPauli) {
    const auto &c = steane();
    std::map<Syndrome, uint64_t> pure_by_syndrome;
    for (uint64_t i = 0; i < pauli_count(7); i++) {
        auto p = PauliOperator::from_index(7, i);
        auto d = decompose(c, p);
        auto back = c.logical_operator(d.logical_class()) * c.stabilizer_element(d.stabilizer_mask) * d.pure_error;
        ASSERT_EQ(back.phase_free(), p) << p;
        Syndrome s = syndrome_of(c, p);
        auto [it, fresh] = pure_by_syndrome.emplace(s, d.pure_error.index());
        EXPECT_EQ(it->second, d.pure_error.index());
        for (const auto &g : c.stabilizers()) EXPECT_EQ(decompose(c, p * g).logical_class(), d.logical_class());
    }
}

TEST(Decoder, BasicInvariants) {
    const auto &c = steane();
    auto dec = build_decoder(c);
    EXPECT_TRUE(dec.recoveries[0].is_identity_up_to_phase());
    for (Syndrome s = 0; s < 64; s++) EXPECT_EQ(syndrome_of(c, dec.recoveries[s]), s);
    EXPECT_THROW(build_decoder(c, {-1, 1, 1}), UsageError);
    EXPECT_THROW(build_decoder(c, {0, 0, 0}), UsageError);
}

TEST(Decoder, CorrectsEveryWeightOneError) {
    const auto &c = steane();
    auto dec = build_decoder(c);
    for (int q = 0; q < 7; q++) {
        for (char l : {'X', 'Y', 'Z'}) {
            std::string s(7, 'I');
            s[q] = l;
            auto e = PauliOperator::from_string(s);
            auto residual = dec.recoveries[syndrome_of(c, e)] * e;
            EXPECT_EQ(decompose(c, residual).logical_class(), LETTER_I) << s;
        }
    }
}

TEST(Decoder, BiasedWeightsPreferZRecoveries) {
    const auto &c = steane();
    auto dec = build_decoder(c, DecoderWeights::biased(100));
    std::vector<double> z_only_best(64, 1e300);
    for (uint64_t i = 0; i < pauli_count(7); i++) {
        auto p = PauliOperator::from_index(7, i);
        if (p.x_bits() != 0) continue;
        Syndrome s = syndrome_of(c, p);
        z_only_best[s] = std::min(z_only_best[s], static_cast<double>(weight(p)));
    }
    int checked = 0;
    for (Syndrome s = 0; s < 64; s++) {
        if (z_only_best[s] < 100) {
            EXPECT_EQ(dec.recoveries[s].x_bits(), 0u) << s;
            checked++;
        }
    }
    EXPECT_GT(checked, 1);
}

TEST(Decoder, MinimumWeightOptimalityOnRandomWeights) {
    const auto &c = steane();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> w(0.1, 5.0);
    std::uniform_int_distribution<int> syn(0, 63);
    for (int trial = 0; trial < 10; trial++) {
        DecoderWeights weights{w(rng), w(rng), w(rng)};
        auto dec = build_decoder(c, weights);
        for (int k = 0; k < 10; k++) {
            Syndrome s = static_cast<Syndrome>(syn(rng));
            double chosen = weighted_cost(dec.recoveries[s], weights);
            for (uint64_t i = 0; i < pauli_count(7); i++) {
                auto p = PauliOperator::from_index(7, i);
                if (syndrome_of(c, p) != s) continue;
                ASSERT_GE(weighted_cost(p, weights), chosen - 1e-12);
            }
        }
    }
}

TEST(Decoder, TiesGoToLowestIndex) {
    const auto &c = steane();
    auto dec = build_decoder(c);
    for (Syndrome s = 0; s < 64; s++) {
        double chosen = weighted_cost(dec.recoveries[s], {});
        for (uint64_t i = 0; i < dec.recoveries[s].index(); i++) {
            auto p = PauliOperator::from_index(7, i);
            if (syndrome_of(c, p) == s) ASSERT_GT(weighted_cost(p, {}), chosen);
        }
    }
}

TEST(CorrectableSet, SizesAndUnion) {
    const auto &c = steane();
    auto dec = build_decoder(c);
    std::set<uint64_t> all;
    for (Syndrome s = 0; s < 64; s++) {
        auto set = correctable_set(c, dec, s);
        std::set<uint64_t> idx;
        for (const auto &e : set) idx.insert(e.index());
        EXPECT_EQ(idx.size(), 64u);
        EXPECT_TRUE(idx.count(dec.recoveries[s].index()));
        all.insert(idx.begin(), idx.end());
    }
    EXPECT_EQ(all.size(), 4096u);
    CodeTables tables(c, dec);
    size_t residual_identity = 0;
    for (uint64_t i = 0; i < pauli_count(7); i++) {
        bool corr = tables.residual_class(i) == LETTER_I;
        residual_identity += corr;
        EXPECT_EQ(corr, all.count(i) == 1);
    }
    EXPECT_EQ(residual_identity, 4096u);
}

TEST(CodeTables, NormalizerElementsAndSigns) {
    auto t = make_tables(steane());
    for (uint8_t a = 0; a < 4; a++) {
        for (uint32_t h = 0; h < 64; h++) {
            auto p = PauliOperator::from_index(7, t->element_index(a, h));
            EXPECT_EQ(t->syndrome(p.index()), 0u);
            EXPECT_EQ(logical_class_of_normalizer_element(t->code(), p), a);
            auto full = t->code().logical_operator(a) * t->code().stabilizer_element(h);
            EXPECT_EQ(full, p.with_phase(t->element_sign(a, h) == 1 ? 0 : 2));
        }
    }
}

TEST(CyclicSearch, FindsDistanceThreeCodes) {
    auto seeds = search_cyclic_codes(7, 3);
    ASSERT_FALSE(seeds.empty());
    auto code = cyclic_code_from_seed("cyclic", seeds.front(), 3);
    EXPECT_EQ(code.n(), 7);
    EXPECT_EQ(code.stabilizers().size(), 6u);
    auto dec = build_decoder(code);
    for (int q = 0; q < 7; q++) {
        for (char l : {'X', 'Y', 'Z'}) {
            std::string s(7, 'I');
            s[q] = l;
            auto e = PauliOperator::from_string(s);
            EXPECT_EQ(decompose(code, dec.recoveries[syndrome_of(code, e)] * e).logical_class(), LETTER_I);
        }
    }
}

TEST(Capacity, LargeCodesRejected) {
    std::vector<std::string> gens;
    for (int i = 0; i < 12; i++) {
        std::string s(13, 'I');
        s[i] = 'Z';
        s[i + 1] = 'Z';
        gens.push_back(s);
    }
    auto code = StabilizerCode::create("rep13", 13, 1, 1, gens, {std::string(13, 'X')}, {"Z" + std::string(12, 'I')});
    EXPECT_THROW(build_decoder(code), CapacityError);
}

}  // namespace
}  // namespace qecest
