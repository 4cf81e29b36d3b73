#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "svmtree/dataset.hpp"
#include "svmtree/error.hpp"

using namespace svmtree;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& text) : path(fixtures::temp_path("csv")) { std::ofstream(path) << text; }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("labels are relabeled densely in first-appearance order") {
    const auto ds = parse_csv("0.5,a\n1.5,b\n2.5,a\n");
    CHECK(ds.num_classes() == 2);
    CHECK(ds[0].label == 1);
    CHECK(ds[1].label == 2);
    CHECK(ds[2].label == 1);
    CHECK(ds.class_name(1) == "a");
    CHECK(ds.class_name(2) == "b");
    CHECK(ds.feature_dim() == 1);
    CHECK_FALSE(ds.normalization().has_value());
}

TEST_CASE("label column, header and negative indices") {
    const auto ds = parse_csv("label,x,y\n7,1,2\n9,3,4\n", {0, true});
    REQUIRE(ds.size() == 2);
    CHECK(ds[0].features == FeatureVector{1, 2});
    CHECK(ds.class_name(2) == "9");
    const auto last = parse_csv("1,2,z\n", {-1, false});
    CHECK(last[0].features == FeatureVector{1, 2});
    const auto second_last = parse_csv("1,q,2\n", {-2, false});
    CHECK(second_last[0].features == FeatureVector{1, 2});
}

TEST_CASE("malformed input reports the row") {
    try {
        parse_csv("1.0,2.0\n1.0\n");
        FAIL("arity mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK(code_of([] { parse_csv(""); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_csv("a,b\n", {-1, true}); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_csv("1,x,1\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_csv("1,,1\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_csv("1,2\n", {5, false}); }) == ErrorCode::parse);
    CHECK(code_of([] { load_csv("/nonexistent/file.csv"); }) == ErrorCode::io);
}

TEST_CASE("load_csv matches parse_csv and blank lines are skipped") {
    TempFile f("1,2,a\n\n3,4,b\r\n");
    const auto a = load_csv(f.path);
    const auto b = parse_csv("1,2,a\n3,4,b\n");
    CHECK(a.size() == 2);
    CHECK(a.content_hash() == b.content_hash());
}

TEST_CASE("real datasets have their documented shapes") {
    const auto iris = load_csv(fixtures::data_path("iris.csv"));
    CHECK(iris.size() == 150);
    CHECK(iris.num_classes() == 3);
    CHECK(iris.feature_dim() == 4);
    const auto digits = load_csv(fixtures::data_path("digits.csv"));
    CHECK(digits.size() == 1797);
    CHECK(digits.num_classes() == 10);
    CHECK(digits.feature_dim() == 64);
}

TEST_CASE("normalization maps onto [-1, 1]") {
    const auto ds = parse_csv("0,7,a\n5,7,b\n10,7,a\n");
    const auto n = normalize(ds);
    CHECK(n[0].features[0] == -1.0);
    CHECK(n[1].features[0] == 0.0);
    CHECK(n[2].features[0] == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(n[i].features[1] == 0.0);
    REQUIRE(n.normalization().has_value());
    CHECK(code_of([&] { normalize(n); }) == ErrorCode::invalid_argument);
}

TEST_CASE("out-of-range values extrapolate without clipping") {
    const Normalization norm({{2.0, 4.0}});
    CHECK(norm.apply(0, 5.0) == doctest::Approx(2.0));
    CHECK(norm.apply(0, 2.0) == -1.0);
    const auto train = parse_csv("2,a\n4,b\n");
    const auto test = parse_csv("5,a\n");
    const auto mapped = apply_normalization(test, fit_normalization(train));
    CHECK(mapped[0].features[0] == doctest::Approx(2.0));
}

TEST_CASE("normalization is idempotent under its own ranges") {
    const auto ds = fixtures::blobs(3, 20, 4, 1.0, 5.0, 11);
    const auto norm = fit_normalization(ds);
    const auto once = apply_normalization(ds, norm);
    for (const auto& ex : once.examples())
        for (double v : ex.features) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    const auto refit = fit_normalization(once);
    const auto twice = apply_normalization(once, refit);
    for (std::size_t i = 0; i < once.size(); ++i)
        for (std::size_t j = 0; j < once.feature_dim(); ++j)
            CHECK(twice[i].features[j] == doctest::Approx(once[i].features[j]).epsilon(1e-12));
}

TEST_CASE("folds: perfect stratification on balanced data") {
    std::string text;
    for (int i = 0; i < 100; ++i) text += std::to_string(i) + "," + (i % 2 ? "x" : "y") + "\n";
    const auto ds = parse_csv(text);
    const auto plan = make_folds(ds, 10, 3);
    for (int f = 0; f < 10; ++f) {
        int per_class[3] = {0, 0, 0};
        for (auto i : plan.test_indices(f)) ++per_class[ds[i].label];
        CHECK(per_class[1] == 5);
        CHECK(per_class[2] == 5);
    }
}

TEST_CASE("folds: single class of 10 into 3 folds gives sizes {4,3,3}") {
    std::string text;
    for (int i = 0; i < 10; ++i) text += std::to_string(i) + ",only\n";
    const auto plan = make_folds(parse_csv(text), 3, 0);
    std::multiset<std::size_t> sizes;
    for (int f = 0; f < 3; ++f) sizes.insert(plan.fold_size(f));
    CHECK(sizes == std::multiset<std::size_t>{3, 3, 4});
}

TEST_CASE("folds partition the data, stratify within one, and are seeded") {
    const auto ds = fixtures::blobs(7, 13, 2, 1.0, 3.0, 5);
    for (int k : {2, 3, 10}) {
        const auto plan = make_folds(ds, k, 42);
        std::vector<int> seen(ds.size(), 0);
        std::size_t total = 0;
        for (int f = 0; f < k; ++f) {
            const auto test = plan.test_indices(f);
            const auto train = plan.train_indices(f);
            CHECK(test.size() + train.size() == ds.size());
            total += test.size();
            for (auto i : test) ++seen[i];
        }
        CHECK(total == ds.size());
        for (int s : seen) CHECK(s == 1);
        for (int c = 1; c <= ds.num_classes(); ++c) {
            std::vector<int> per_fold(static_cast<std::size_t>(k), 0);
            for (std::size_t i = 0; i < ds.size(); ++i)
                if (ds[i].label == c) ++per_fold[static_cast<std::size_t>(plan.assignments[i])];
            const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
            CHECK(*hi - *lo <= 1);
        }
        CHECK(make_folds(ds, k, 42).assignments == plan.assignments);
    }
    CHECK(make_folds(ds, 10, 1).assignments != make_folds(ds, 10, 2).assignments);
    CHECK(code_of([&] { make_folds(ds, 1, 0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { make_folds(ds, static_cast<int>(ds.size()) + 1, 0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("subsets keep the class inventory") {
    const auto ds = parse_csv("1,a\n2,b\n3,c\n");
    const std::size_t pick[] = {2};
    const auto sub = ds.subset(pick);
    CHECK(sub.size() == 1);
    CHECK(sub.num_classes() == 3);
    CHECK(sub.present_classes() == std::vector<int>{3});
    CHECK(sub.class_histogram()[3] == 1);
}

TEST_CASE("content hash tracks features, labels and names") {
    const auto a = parse_csv("1,2,a\n3,4,b\n");
    CHECK(a.content_hash() == parse_csv("1,2,a\n3,4,b\n").content_hash());
    CHECK(a.content_hash() != parse_csv("1,2,a\n3,5,b\n").content_hash());
    CHECK(a.content_hash() != parse_csv("1,2,b\n3,4,a\n").content_hash());
    CHECK(a.content_hash() != parse_csv("1,2,a\n3,4,c\n").content_hash());
}

TEST_CASE("feature rows for prediction input") {
    TempFile f("h1,h2,h3\n1,2,x\n3,4,y\n");
    const auto rows = load_feature_rows(f.path, true, -1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == FeatureVector{3, 4});
    TempFile empty("");
    CHECK(load_feature_rows(empty.path, false).empty());
}
