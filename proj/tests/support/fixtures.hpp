// Synthetic datasets and stub classifiers shared by the test programs.
#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "svmtree/baselines.hpp"
#include "svmtree/dataset.hpp"
#include "svmtree/random.hpp"
#include "svmtree/svm_binary.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(SVMTREE_TEST_DATA_DIR) + "/" + name; }

// A fresh path under the system temp directory, unique per process and tag.
inline std::string temp_path(const std::string& tag) {
    static int counter = 0;
    const auto name = "svmtree_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + tag;
    return (std::filesystem::temp_directory_path() / name).string();
}

inline std::vector<std::string> numbered_names(int classes) {
    std::vector<std::string> names;
    for (int c = 1; c <= classes; ++c) names.push_back(std::to_string(c));
    return names;
}

// Isotropic Gaussian blobs around centers drawn uniformly from [-box, box]^dim.
inline svmtree::Dataset blobs(int classes, int per_class, int dim, double spread, double box, std::uint64_t seed) {
    svmtree::Rng rng(seed);
    std::uniform_real_distribution<double> center(-box, box);
    std::normal_distribution<double> noise(0.0, spread);
    std::vector<svmtree::FeatureVector> centers(static_cast<std::size_t>(classes));
    for (auto& c : centers) {
        c.resize(static_cast<std::size_t>(dim));
        for (auto& v : c) v = center(rng);
    }
    std::vector<svmtree::Example> ex;
    for (int k = 0; k < per_class; ++k)
        for (int c = 0; c < classes; ++c) {
            svmtree::FeatureVector x = centers[static_cast<std::size_t>(c)];
            for (auto& v : x) v += noise(rng);
            ex.push_back({x, c + 1});
        }
    return svmtree::Dataset(std::move(ex), numbered_names(classes));
}

// Classes on a ring in the plane; neighbours overlap when spread is large.
inline svmtree::Dataset ring(int classes, int per_class, double spread, std::uint64_t seed) {
    svmtree::Rng rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    std::vector<svmtree::Example> ex;
    for (int c = 0; c < classes; ++c) {
        const double angle = 2 * M_PI * c / classes;
        for (int k = 0; k < per_class; ++k)
            ex.push_back({{std::cos(angle) + noise(rng), std::sin(angle) + noise(rng)}, c + 1});
    }
    return svmtree::Dataset(std::move(ex), numbered_names(classes));
}

// decision(x) = w . x + bias, as a linear-kernel model with one "support
// vector" w of coefficient 1.
inline svmtree::BinaryModel linear_stub(svmtree::FeatureVector w, double bias) {
    svmtree::BinaryModel m;
    m.kernel = svmtree::KernelSpec::linear();
    m.dim = w.size();
    m.support_vectors = {std::move(w)};
    m.dual_coefs = {1.0};
    m.bias = bias;
    return m;
}

// Unit vector e_t in n dimensions, t in 1..n: a point that "is" class t.
inline svmtree::FeatureVector one_hot(int n, int t) {
    svmtree::FeatureVector x(static_cast<std::size_t>(n), 0.0);
    x[static_cast<std::size_t>(t - 1)] = 1.0;
    return x;
}

// Pairwise stubs h_ij(x) = x_i - x_j: on one_hot(n, t) class t wins every
// match it plays, while matches between two other classes go to the lower id.
inline svmtree::OvoPool one_hot_pool(int n) {
    std::map<std::pair<int, int>, svmtree::BinaryModel> models;
    std::vector<int> classes;
    for (int i = 1; i <= n; ++i) {
        classes.push_back(i);
        for (int j = i + 1; j <= n; ++j) {
            auto w = one_hot(n, i);
            w[static_cast<std::size_t>(j - 1)] = -1.0;
            models.emplace(std::pair{i, j}, linear_stub(w, 0.0));
        }
    }
    return svmtree::OvoPool(classes, std::move(models));
}

// Input-independent pairwise stubs: i beats j iff beats(i, j).
template <class Beats>
svmtree::OvoPool constant_pool(int n, Beats&& beats) {
    std::map<std::pair<int, int>, svmtree::BinaryModel> models;
    std::vector<int> classes;
    for (int i = 1; i <= n; ++i) {
        classes.push_back(i);
        for (int j = i + 1; j <= n; ++j) models.emplace(std::pair{i, j}, svmtree::constant_model(beats(i, j) ? 1.0 : -1.0, 1));
    }
    return svmtree::OvoPool(classes, std::move(models));
}

}  // namespace fixtures
