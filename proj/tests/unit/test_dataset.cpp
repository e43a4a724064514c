#include <doctest.h>

#include <cmath>
#include <set>

#include "sgrf/csv.hpp"
#include "sgrf/dataset.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/rng.hpp"

#include "../support/builders.hpp"

using namespace sgrf;

namespace {

const char* kTinySchema = R"({
  "label_column": "y",
  "features": [
    {"name": "a", "kind": "continuous"},
    {"name": "b", "kind": "categorical", "cardinality": 3},
    {"name": "c", "kind": "binary"}
  ]
})";

Dataset tiny(const std::string& csv_text) {
    return load_csv_text(csv_text, parse_schema(kTinySchema));
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("schema parses kinds, cardinality and ranges") {
    Schema s = parse_schema(R"({"label_column": "y", "features": [
        {"name": "age", "kind": "continuous", "range": [2, 54]},
        {"name": "g", "kind": "binary"},
        {"name": "loc", "kind": "categorical", "cardinality": 5}]})");
    CHECK(s.features.size() == 3);
    CHECK(s.features[0].range->first == 2.0);
    CHECK(s.features[1].cardinality == 2);
    CHECK(s.features[2].cardinality == 5);
    CHECK(schema_of(load_csv_text("age,g,loc,y\n", s)).label_column == "y");

    CHECK_THROWS_AS(parse_schema(R"({"label_column": "y", "features": []})"), InputError);
    CHECK_THROWS_AS(parse_schema(R"({"label_column": "a", "features": [
        {"name": "a", "kind": "continuous"}]})"),
                    InputError);  // label collides with feature
    CHECK_THROWS_AS(parse_schema(R"({"label_column": "y", "features": [
        {"name": "a", "kind": "categorical", "cardinality": 1}]})"),
                    InputError);
    CHECK_THROWS_AS(parse_schema(R"({"label_column": "y", "features": [
        {"name": "a", "kind": "continuous", "range": [5, 2]}]})"),
                    InputError);
}

TEST_CASE("load_csv maps labels in first-appearance order and tracks missing") {
    Dataset ds = tiny("a,b,c,y\n1.5,2,0,SN\n,1,1,AST\n2.5,,0,SN\n");
    CHECK(ds.n_rows() == 3);
    CHECK(ds.n_features() == 3);
    CHECK(ds.label_names == std::vector<std::string>{"SN", "AST"});
    CHECK(ds.y == std::vector<int>{0, 1, 0});
    CHECK(ds.is_missing(1, 0));
    CHECK(ds.is_missing(2, 1));
    CHECK(!ds.is_missing(0, 0));
    CHECK(ds.at(0, 0) == 1.5);
    CHECK(ds.class_counts() == std::vector<std::size_t>{2, 1});
}

TEST_CASE("load_csv accepts a header-only file") {
    Dataset ds = tiny("a,b,c,y\n");
    CHECK(ds.n_rows() == 0);
    CHECK(ds.n_features() == 3);
}

TEST_CASE("load_csv errors name the offending cell") {
    CHECK_THROWS_WITH_AS(tiny("a,b,c,y\nabc,1,0,SN\n"),
                         doctest::Contains("column 'a'"), InputError);
    CHECK_THROWS_WITH_AS(tiny("a,b,c,y\n1.0,1.5,0,SN\n"),
                         doctest::Contains("non-integer code"), InputError);
    CHECK_THROWS_WITH_AS(tiny("a,b,c,y\n1.0,1,0,\n"), doctest::Contains("label cell missing"),
                         InputError);
    CHECK_THROWS_WITH_AS(tiny("a,b,q,y\n"), doctest::Contains("unknown column"), InputError);
    CHECK_THROWS_WITH_AS(tiny("a,b,y\n"), doctest::Contains("missing column"), InputError);
}

TEST_CASE("impute fills mean for continuous, mode for coded columns") {
    Dataset ds = tiny("a,b,c,y\n2,1,0,x\n,1,1,x\n4,2,,z\n");
    Dataset filled = impute(ds);
    CHECK(!filled.has_missing());
    CHECK(filled.at(1, 0) == 3.0);  // mean of 2 and 4
    CHECK(filled.at(2, 2) == 0.0);  // mode tie between 0 and 1 goes to 0
    Dataset cat = tiny("a,b,c,y\n1,1,0,x\n1,1,0,x\n1,2,0,z\n1,,0,z\n");
    CHECK(impute(cat).at(3, 1) == 1.0);  // mode
}

TEST_CASE("impute mode tie picks the smallest code (checked by enumeration)") {
    Dataset ds = tiny("a,b,c,y\n1,1,0,x\n1,1,1,x\n1,1,,z\n");
    // column c observes one 0 and one 1; enumerate both candidates
    std::size_t zeros = 0, ones = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (ds.is_missing(r, 2)) continue;
        (ds.at(r, 2) == 0.0 ? zeros : ones)++;
    }
    REQUIRE(zeros == ones);  // genuine tie
    CHECK(impute(ds).at(2, 2) == 0.0);
}

TEST_CASE("impute is idempotent") {
    Dataset ds = tiny("a,b,c,y\n2,1,0,x\n,2,1,x\n4,,,z\n");
    Dataset once = impute(ds);
    Dataset twice = impute(once);
    CHECK(once.x == twice.x);
    CHECK(once.missing == twice.missing);
}

TEST_CASE("impute rejects a fully-missing column") {
    Dataset ds = tiny("a,b,c,y\n,1,0,x\n,1,1,z\n");
    CHECK_THROWS_WITH_AS(impute(ds), doctest::Contains("drop_degenerate"), ComputeError);
}

TEST_CASE("scaling maps the training range onto [0,1]") {
    Dataset ds = tiny("a,b,c,y\n2,1,0,x\n54,1,1,x\n28,2,0,z\n");
    ScaleParams p = fit_scale(ds);
    Dataset scaled = apply_scale(ds, p);
    CHECK(scaled.at(0, 0) == 0.0);
    CHECK(scaled.at(1, 0) == 1.0);
    CHECK(scaled.at(2, 0) == 0.5);

    // train-fitted params applied to out-of-range data exceed 1
    Dataset test = tiny("a,b,c,y\n60,1,0,x\n");
    Dataset scaled_test = apply_scale(test, p);
    CHECK(scaled_test.at(0, 0) == (60.0 - 2.0) / 52.0);
    CHECK(scaled_test.at(0, 0) == doctest::Approx(1.115).epsilon(1e-3));
}

TEST_CASE("scaling maps constant columns to zero") {
    Dataset ds = tiny("a,b,c,y\n5,1,0,x\n5,1,1,x\n5,2,0,z\n");
    Dataset scaled = apply_scale(ds, fit_scale(ds));
    for (std::size_t r = 0; r < 3; ++r) CHECK(scaled.at(r, 0) == 0.0);
}

TEST_CASE("scale of training data always lands in [0,1]") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> rows(10, std::vector<double>(3));
        std::vector<int> labels;
        for (auto& row : rows) {
            for (auto& v : row) v = rng.uniform01() * 100.0 - 50.0;
            labels.push_back(static_cast<int>(rng.uniform_index(2)));
        }
        Dataset ds = builders::dataset(rows, labels);
        Dataset scaled = apply_scale(ds, fit_scale(ds));
        for (double v : scaled.x) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("drop_degenerate removes constant and all-missing columns only") {
    GeneratorConfig cfg = parse_generator_config(builders::clinic54_json(3));
    Dataset ds = generate_synthetic(cfg);
    REQUIRE(ds.n_features() == 29);
    auto [kept, dropped] = drop_degenerate(ds);
    CHECK(kept.n_features() == 27);
    CHECK(dropped == std::vector<std::string>{"P16", "ALK_Fish"});
    CHECK(kept.n_rows() == ds.n_rows());

    // no degenerate columns: identity
    Dataset clean = tiny("a,b,c,y\n1,1,0,x\n2,2,1,z\n");
    auto [same, none] = drop_degenerate(clean);
    CHECK(none.empty());
    CHECK(same.x == clean.x);

    // everything degenerate: zero features survive
    Dataset bad = tiny("a,b,c,y\n1,1,,x\n1,1,,z\n");
    auto [empty, all] = drop_degenerate(bad);
    CHECK(empty.n_features() == 0);
    CHECK(all.size() == 3);
    CHECK(empty.n_rows() == 2);
}

TEST_CASE("drop_degenerate keeps any column with variance") {
    Rng rng(11);
    std::vector<std::vector<double>> rows(8, std::vector<double>(4));
    std::vector<int> labels(8, 0);
    for (auto& row : rows) {
        for (auto& v : row) v = rng.uniform01();
    }
    labels[0] = 1;
    Dataset ds = builders::dataset(rows, labels);
    auto [kept, dropped] = drop_degenerate(ds);
    CHECK(dropped.empty());
    CHECK(kept.n_features() == 4);
}

TEST_CASE("csv round-trip reproduces the matrix bit-exactly") {
    GeneratorConfig cfg = parse_generator_config(builders::clinic54_json(9));
    Dataset ds = generate_synthetic(cfg);
    Schema schema = schema_of(ds);
    Dataset back = load_csv_text(to_csv(ds), schema);
    CHECK(back.x == ds.x);
    CHECK(back.missing == ds.missing);
    CHECK(back.y == ds.y);
    CHECK(back.label_names == ds.label_names);
}

TEST_CASE("generator honors class counts and seed determinism") {
    GeneratorConfig cfg = parse_generator_config(builders::clinic54_json(42));
    Dataset a = generate_synthetic(cfg);
    Dataset b = generate_synthetic(cfg);
    CHECK(a.n_rows() == 54);
    CHECK(a.class_counts() == std::vector<std::size_t>{47, 7});
    CHECK(a.x == b.x);
    CHECK(a.missing == b.missing);
    CHECK(a.y == b.y);

    Dataset c = generate_synthetic(cfg, 43);
    CHECK(a.x != c.x);
}

TEST_CASE("generator rejects invalid class counts") {
    GeneratorConfig cfg = parse_generator_config(builders::clinic54_json());
    cfg.class_counts = {47, -1};
    CHECK_THROWS_AS(generate_synthetic(cfg), InputError);
    cfg.class_counts = {0, 0};
    CHECK_THROWS_AS(generate_synthetic(cfg), InputError);
}

TEST_CASE("generator noise features stay uncorrelated with the label") {
    GeneratorConfig cfg = builders::blobs(250, 250, 4, 8, 2.0, 17);
    Dataset ds = generate_synthetic(cfg);
    REQUIRE(ds.n_rows() == 500);
    for (std::size_t j = 4; j < 12; ++j) {  // noise block
        double mean_x = 0, mean_y = 0;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            mean_x += ds.at(r, j);
            mean_y += ds.y[r];
        }
        mean_x /= ds.n_rows();
        mean_y /= ds.n_rows();
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            double dx = ds.at(r, j) - mean_x;
            double dy = ds.y[r] - mean_y;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        double corr = sxy / std::sqrt(sxx * syy);
        CHECK(std::abs(corr) < 0.3);
    }
}

TEST_CASE("select_columns and select_rows preserve metadata") {
    Dataset ds = tiny("a,b,c,y\n1,1,0,x\n2,2,1,z\n3,0,1,x\n");
    Dataset cols = select_columns(ds, {2, 0});
    CHECK(cols.feature_names() == std::vector<std::string>{"c", "a"});
    CHECK(cols.at(1, 1) == 2.0);
    Dataset rows = select_rows(ds, {2, 0});
    CHECK(rows.y == std::vector<int>{0, 0});
    CHECK(rows.at(0, 0) == 3.0);
}

}  // TEST_SUITE
