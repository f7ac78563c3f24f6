#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "opcum/errors.hpp"
#include "opcum/util.hpp"

namespace opcum {

using Matrix = Eigen::MatrixXcd;

/// A finite probability space with one matrix per atom index per sample.
/// Averages are exact weighted sums, so identity checks carry no statistical
/// tolerance.
struct OperatorModel {
    struct Sample {
        double weight = 0.0;
        std::map<int, Matrix> ops;
    };

    int dim = 0;
    std::vector<Sample> samples;

    void validate() const {
        if (dim < 1) throw validation_error("model dimension must be >= 1");
        if (samples.empty()) throw validation_error("model has no samples");
        double total = 0.0;
        for (const Sample& s : samples) {
            if (s.weight <= 0.0) throw validation_error("sample weights must be positive");
            total += s.weight;
            for (const auto& [idx, m] : s.ops)
                if (m.rows() != dim || m.cols() != dim)
                    throw validation_error("operator dimension mismatch for atom " +
                                           std::to_string(idx));
        }
        if (std::abs(total - 1.0) > 1e-14)
            throw validation_error("sample weights must sum to 1");
    }

    const Matrix& op(int sample, int atom) const {
        auto it = samples[sample].ops.find(atom);
        if (it == samples[sample].ops.end())
            throw validation_error("no assignment for atom " + std::to_string(atom));
        return it->second;
    }
};

/// <atoms[0] atoms[1] ...> evaluated exactly: the weighted sum over samples
/// of the matrix product in the written order.
inline Matrix moment_value(const OperatorModel& model, const std::vector<int>& atoms) {
    Matrix acc = Matrix::Zero(model.dim, model.dim);
    for (std::size_t s = 0; s < model.samples.size(); ++s) {
        Matrix prod = Matrix::Identity(model.dim, model.dim);
        for (int a : atoms) prod = prod * model.op(static_cast<int>(s), a);
        acc += model.samples[s].weight * prod;
    }
    return acc;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline OperatorModel build_random_model(int dim, int n_atoms, int n_samples,
                                        std::uint64_t seed) {
    if (dim < 2) throw validation_error("model dimension must be >= 2");
    if (n_samples < 1) throw validation_error("need at least one sample");
    std::mt19937_64 rng(seed);
    OperatorModel model;
    model.dim = dim;
    model.samples.resize(n_samples);
    for (auto& sample : model.samples) {
        sample.weight = 1.0 / n_samples;
        for (int a = 1; a <= n_atoms; ++a) {
            Matrix m(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    m(r, c) = std::complex<double>(uniform_pm1(rng), uniform_pm1(rng));
            sample.ops.emplace(a, std::move(m));
        }
    }
    return model;
}

/// Product measure of two independent models: group A holds atoms 1..split,
/// group B the rest. Mixed cumulants on the combined model must vanish.
struct SplitModel {
    int split = 0;
    OperatorModel group_a;  // atoms 1..split
    OperatorModel group_b;  // atoms split+1..n

    OperatorModel combined() const {
        OperatorModel joint;
        joint.dim = group_a.dim;
        for (const auto& sa : group_a.samples)
            for (const auto& sb : group_b.samples) {
                OperatorModel::Sample s;
                s.weight = sa.weight * sb.weight;
                s.ops = sa.ops;
                s.ops.insert(sb.ops.begin(), sb.ops.end());
                joint.samples.push_back(std::move(s));
            }
        return joint;
    }
};

inline SplitModel build_split_model(int dim, int n_atoms, int split, int samples_per_group,
                                    std::uint64_t seed_a, std::uint64_t seed_b) {
    if (split < 1 || split >= n_atoms)
        throw validation_error("split must satisfy 1 <= split < n_atoms");
    SplitModel sm;
    sm.split = split;
    sm.group_a = build_random_model(dim, split, samples_per_group, seed_a);
    OperatorModel b = build_random_model(dim, n_atoms - split, samples_per_group, seed_b);
    sm.group_b.dim = dim;
    for (auto& s : b.samples) {
        OperatorModel::Sample shifted;
        shifted.weight = s.weight;
        for (auto& [idx, m] : s.ops) shifted.ops.emplace(idx + split, std::move(m));
        sm.group_b.samples.push_back(std::move(shifted));
    }
    return sm;
}

// -------------------------------------------------------------- JSON files
//
// { "dim": d, "samples": [ { "w": float,
//                            "ops": { "1": [[re,im], ... d*d pairs row-major] } } ] }

inline nlohmann::json model_to_json(const OperatorModel& model) {
    nlohmann::json root;
    root["dim"] = model.dim;
    root["samples"] = nlohmann::json::array();
    for (const auto& s : model.samples) {
        nlohmann::json js;
        js["w"] = s.weight;
        js["ops"] = nlohmann::json::object();
        for (const auto& [idx, m] : s.ops) {
            nlohmann::json entries = nlohmann::json::array();
            for (int r = 0; r < model.dim; ++r)
                for (int c = 0; c < model.dim; ++c)
                    entries.push_back({m(r, c).real(), m(r, c).imag()});
            js["ops"][std::to_string(idx)] = entries;
        }
        root["samples"].push_back(js);
    }
    return root;
}

inline OperatorModel model_from_json(const nlohmann::json& root) {
    OperatorModel model;
    try {
        model.dim = root.at("dim").get<int>();
        for (const auto& js : root.at("samples")) {
            OperatorModel::Sample s;
            s.weight = js.at("w").get<double>();
            for (const auto& [key, entries] : js.at("ops").items()) {
                int atom = std::stoi(key);
                if (static_cast<int>(entries.size()) != model.dim * model.dim)
                    throw validation_error("operator entry count mismatch for atom " + key);
                Matrix m(model.dim, model.dim);
                int k = 0;
                for (int r = 0; r < model.dim; ++r)
                    for (int c = 0; c < model.dim; ++c, ++k)
                        m(r, c) = std::complex<double>(entries[k][0].get<double>(),
                                                       entries[k][1].get<double>());
                s.ops.emplace(atom, std::move(m));
            }
            model.samples.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed model file: ") + e.what());
    }
    model.validate();
    return model;
}

inline OperatorModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open model file: " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed model file: ") + e.what());
    }
    return model_from_json(root);
}

inline void save_model(const OperatorModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write model file: " + path);
    out << model_to_json(model).dump(1) << "\n";
}

}  // namespace opcum
