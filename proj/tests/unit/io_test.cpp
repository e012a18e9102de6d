#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "hqmc/io.hpp"

namespace hqmc {
namespace {

using testing::Rng;

std::string fixture(std::string const& name) { return std::string(HQMC_MODELS_DIR) + "/" + name; }

/// Serialization is a fixed point after one round trip.
void expect_round_trip(AnyModel const& model) {
    Json const first = model_to_json(model);
    AnyModel const back = model_from_json(first);
    EXPECT_EQ(kind_name(back), kind_name(model));
    EXPECT_EQ(model_to_json(back), first);
}

TEST(Io, MatrixEntries) {
    Matrix m(2, 2);
    m << Complex(1, 2), Complex(0, -0.5), Complex(1e-300, 0), Complex(0.1, 0.7);
    EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
    EXPECT_EQ(matrix_from_json(Json::parse("[[1, [0, 1]], [2.5, 0]]"))(0, 1), Complex(0, 1));
    EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]")), Error);
    EXPECT_THROW(matrix_from_json(Json::parse("[[1, [0, 1, 2]]]")), Error);
}

TEST(Io, RoundTripsRandomModels) {
    Rng rng(70);
    for (int trial = 0; trial < 5; ++trial) {
        auto const sl = testing::random_slhqmc(rng, 3, 2, 2);
        expect_round_trip(sl.chain);
        expect_round_trip(sl);
        expect_round_trip(testing::random_hqa(rng, 2, 2, 2, testing::Fashion::Classical));
        expect_round_trip(testing::random_hqa(rng, 2, 2, 2, testing::Fashion::Quantum));
        expect_round_trip(testing::random_hqa(rng, 2, 2, 2, testing::Fashion::Mixed));
        expect_round_trip(testing::random_qa(rng, 2, 2));
        expect_round_trip(testing::random_blm(rng, 3, 2));
        expect_round_trip(testing::random_dfa(rng, sl.ap, 3));
        QMC q;
        q.dim = 2;
        q.op = testing::random_channel(rng, 2);
        q.init = testing::random_density(rng, 2);
        expect_round_trip(q);
    }
}

TEST(Io, RoundTripPreservesValues) {
    Rng rng(71);
    auto const a = testing::random_blm(rng, 3, 2);
    auto const b = std::get<BLM>(model_from_json(model_to_json(a)));
    for (auto const& w : testing::all_words(2, 3)) {
        EXPECT_EQ(blm_weight(a, w), blm_weight(b, w));
    }
}

TEST(Io, EveryFixtureRoundTrips) {
    for (auto const& entry : std::filesystem::recursive_directory_iterator(HQMC_MODELS_DIR)) {
        if (entry.path().extension() == ".json") {
            SCOPED_TRACE(entry.path().string());
            expect_round_trip(load_model(entry.path()));
        }
    }
}

TEST(Io, SaveAndLoad) {
    auto const path = std::filesystem::temp_directory_path() / "hqmc_io_test_model.json";
    auto const m = load_model(fixture("three_state_hqmc.json"));
    save_model(m, path);
    EXPECT_EQ(model_to_json(load_model(path)), model_to_json(m));
    std::filesystem::remove(path);
}

TEST(Io, SyntaxErrorsReportPosition) {
    try {
        parse_json_text("{\n  \"kind\": \"blm\",\n  oops\n}", "doc.json");
        FAIL() << "expected ParseError";
    } catch (ParseError const& e) {
        std::string const what = e.what();
        EXPECT_NE(what.find("doc.json"), std::string::npos) << what;
        EXPECT_NE(what.find("3:"), std::string::npos) << what;
    }
}

TEST(Io, MissingFileIsAnError) { EXPECT_THROW(load_model(fixture("does_not_exist.json")), Error); }

TEST(Io, RejectsMalformedDocuments) {
    EXPECT_THROW(model_from_json(Json::parse(R"({"kind": "nope"})")), ParseError);
    EXPECT_THROW(model_from_json(Json::parse(R"({"states": []})")), ParseError);
    EXPECT_THROW(model_from_json(Json::parse(R"([1, 2])")), ParseError);
    // Missing field.
    EXPECT_THROW(model_from_json(Json::parse(R"({"kind": "blm", "n": 1, "alphabet": ["a"]})")), ParseError);
    // Separator character inside a name.
    EXPECT_THROW(model_from_json(Json::parse(
                     R"({"kind": "hqmc", "dim": 1, "states": ["a|b"], "init": {}})")),
                 ParseError);
}

TEST(Io, ShapeMismatchIsLeftToValidation) {
    auto const m = model_from_json(Json::parse(R"({"kind": "qmc", "dim": 2, "op": {"kraus": [[[1]]]}, "init": [[1]]})"));
    EXPECT_FALSE(validate(std::get<QMC>(m)).ok());
}

TEST(Io, RejectsPartialDfa) {
    auto j = model_to_json(load_model(fixture("never_bad_dfa.json")));
    ASSERT_TRUE(j.contains("delta"));
    j["delta"].erase(j["delta"].begin());
    EXPECT_THROW(model_from_json(j), ParseError);
}

TEST(Io, RejectsUnknownStateReference) {
    auto j = model_to_json(load_model(fixture("three_state_hqmc.json")));
    j["init"]["ghost"] = Json::array({Json::array({1})});
    EXPECT_THROW(model_from_json(j), ParseError);
}

TEST(Io, VerdictJson) {
    EquivalenceVerdict v;
    v.equivalent = false;
    v.witness = Word{1, 0};
    v.basis_size = 3;
    v.margin = 0.25;
    auto const j = verdict_to_json(v, {"a", "b"});
    EXPECT_EQ(j["equivalent"], false);
    EXPECT_EQ(j["witness"], Json::array({"b", "a"}));
    EXPECT_EQ(j["basis_size"], 3);
    v.equivalent = true;
    v.witness.reset();
    EXPECT_TRUE(verdict_to_json(v, {"a", "b"})["witness"].is_null());
}

}  // namespace
}  // namespace hqmc
