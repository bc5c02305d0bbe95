#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "tempo/models.hpp"

namespace tempo {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'F', 'C', 'K', 'P', 'T', '0', '1'};

struct NamedMatrix {
    std::string name;
    const Matrix* m;
};

struct NamedInts {
    std::string name;
    std::vector<std::int64_t> values;
};

json config_to_json(const TrainConfig& cfg) {
    json j;
    j["k"] = cfg.k;
    j["r"] = cfg.r;
    j["alpha"] = cfg.alpha;
    j["lambda"] = cfg.lambda;
    j["lambda_a"] = cfg.lambda_a;
    j["sigma"] = cfg.sigma;
    j["bin_days"] = cfg.bin_days;
    j["trending_window_days"] = cfg.trending_window_days;
    j["iterations"] = cfg.iterations;
    j["seed"] = cfg.seed;
    j["default_user"] = cfg.default_user;
    j["default_item"] = cfg.default_item;
    j["default_time"] = cfg.default_time;
    if (cfg.half_life_days) j["half_life_days"] = *cfg.half_life_days;
    j["threads"] = cfg.threads;
    j["cg_tol"] = cfg.cg_tol;
    j["cg_max_iter"] = cfg.cg_max_iter;
    j["kernel_samples"] = cfg.kernel_samples;
    j["ease_item_cap"] = cfg.ease_item_cap;
    j["dmf_max_elements"] = cfg.dmf_max_elements;
    return j;
}

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.k = j.at("k").get<int>();
    cfg.r = j.at("r").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.lambda = j.at("lambda").get<double>();
    cfg.lambda_a = j.at("lambda_a").get<double>();
    cfg.sigma = j.at("sigma").get<double>();
    cfg.bin_days = j.at("bin_days").get<double>();
    cfg.trending_window_days = j.at("trending_window_days").get<double>();
    cfg.iterations = j.at("iterations").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.default_user = j.at("default_user").get<bool>();
    cfg.default_item = j.at("default_item").get<bool>();
    cfg.default_time = j.at("default_time").get<bool>();
    if (j.contains("half_life_days")) cfg.half_life_days = j.at("half_life_days").get<double>();
    cfg.threads = j.at("threads").get<int>();
    cfg.cg_tol = j.at("cg_tol").get<double>();
    cfg.cg_max_iter = j.at("cg_max_iter").get<int>();
    cfg.kernel_samples = j.at("kernel_samples").get<int>();
    cfg.ease_item_cap = j.at("ease_item_cap").get<int>();
    cfg.dmf_max_elements = j.at("dmf_max_elements").get<std::int64_t>();
    return cfg;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    std::vector<double> buf(static_cast<std::size_t>(m.rows()) * m.cols());
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            buf[idx++] = m(i, j);
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

Matrix read_matrix(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
    std::vector<double> buf(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) throw IoError("load_checkpoint: truncated matrix payload");
    Matrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = buf[idx++];
        }
    }
    return m;
}

}  // namespace

void save_checkpoint(const FactorModel& model, const std::string& path) {
    std::vector<NamedMatrix> matrices;
    std::vector<NamedInts> int_arrays;
    Matrix trending;   // column view of the counts
    Matrix dmf_stack;  // item fits stacked to (n*r) x k

    switch (model.kind) {
        case ModelKind::WMF:
            matrices = {{"P", &model.P}, {"Q", &model.Q}};
            break;
        case ModelKind::ITALS:
        case ModelKind::ITALSX:
            matrices = {{"P", &model.P}, {"Q", &model.Q}, {"B", &model.B}};
            break;
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL:
            matrices = {{"P", &model.P}, {"Q", &model.Q}, {"A", &model.A}};
            break;
        case ModelKind::DMF: {
            const auto n = static_cast<Eigen::Index>(model.item_fits.size());
            const Eigen::Index r = model.item_fits.empty() ? 0 : model.item_fits[0].rows();
            const Eigen::Index k = model.item_fits.empty() ? 0 : model.item_fits[0].cols();
            dmf_stack.resize(n * r, k);
            for (Eigen::Index i = 0; i < n; ++i) {
                dmf_stack.middleRows(i * r, r) = model.item_fits[i];
            }
            matrices = {{"P", &model.P}, {"A_stack", &dmf_stack}};
            break;
        }
        case ModelKind::EASE: {
            matrices = {{"B", &model.ease_b}};
            NamedInts offsets{"history_offsets", {}};
            NamedInts items{"history_items", {}};
            offsets.values.push_back(0);
            for (const auto& h : model.ease_histories) {
                for (int i : h) items.values.push_back(i);
                offsets.values.push_back(static_cast<std::int64_t>(items.values.size()));
            }
            int_arrays.push_back(std::move(offsets));
            int_arrays.push_back(std::move(items));
            break;
        }
        case ModelKind::TRENDING:
            trending = model.trending_counts;
            matrices = {{"counts", &trending}};
            break;
    }

    json header;
    header["kind"] = to_string(model.kind);
    header["t_min"] = model.t_min;
    header["t_max"] = model.t_max;
    header["bin_seconds"] = model.bin_seconds;
    header["n_bins"] = model.n_bins;
    header["config"] = config_to_json(model.cfg);
    header["matrices"] = json::array();
    for (const auto& nm : matrices) {
        header["matrices"].push_back(
            {{"name", nm.name}, {"rows", nm.m->rows()}, {"cols", nm.m->cols()}});
    }
    header["int_arrays"] = json::array();
    for (const auto& na : int_arrays) {
        header["int_arrays"].push_back({{"name", na.name}, {"size", na.values.size()}});
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_checkpoint: cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::string header_str = header.dump();
    const std::uint64_t len = header_str.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& nm : matrices) write_matrix(out, *nm.m);
    for (const auto& na : int_arrays) {
        out.write(reinterpret_cast<const char*>(na.values.data()),
                  static_cast<std::streamsize>(na.values.size() * sizeof(std::int64_t)));
    }
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

FactorModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("load_checkpoint: " + path + " is not a checkpoint file");
    }
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string header_str(len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("load_checkpoint: truncated header");

    json header = json::parse(header_str);
    FactorModel model;
    model.kind = model_kind_from_string(header.at("kind").get<std::string>());
    model.t_min = header.at("t_min").get<std::int64_t>();
    model.t_max = header.at("t_max").get<std::int64_t>();
    model.bin_seconds = header.at("bin_seconds").get<std::int64_t>();
    model.n_bins = header.at("n_bins").get<int>();
    model.cfg = config_from_json(header.at("config"));

    std::vector<std::pair<std::string, Matrix>> matrices;
    for (const auto& jm : header.at("matrices")) {
        matrices.emplace_back(jm.at("name").get<std::string>(),
                              read_matrix(in, jm.at("rows").get<Eigen::Index>(),
                                          jm.at("cols").get<Eigen::Index>()));
    }
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> int_arrays;
    for (const auto& ja : header.at("int_arrays")) {
        std::vector<std::int64_t> values(ja.at("size").get<std::size_t>());
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(std::int64_t)));
        if (!in) throw IoError("load_checkpoint: truncated int array");
        int_arrays.emplace_back(ja.at("name").get<std::string>(), std::move(values));
    }

    auto take = [&](const std::string& name) -> Matrix {
        for (auto& [n, m] : matrices) {
            if (n == name) return std::move(m);
        }
        throw IoError("load_checkpoint: missing matrix " + name);
    };

    switch (model.kind) {
        case ModelKind::WMF:
            model.P = take("P");
            model.Q = take("Q");
            break;
        case ModelKind::ITALS:
        case ModelKind::ITALSX:
            model.P = take("P");
            model.Q = take("Q");
            model.B = take("B");
            break;
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL:
            model.P = take("P");
            model.Q = take("Q");
            model.A = take("A");
            break;
        case ModelKind::DMF: {
            model.P = take("P");
            const Matrix stack = take("A_stack");
            const int r = model.cfg.r;
            if (r <= 0 || stack.rows() % r != 0) {
                throw IoError("load_checkpoint: inconsistent DMF fit stack");
            }
            const Eigen::Index n = stack.rows() / r;
            model.item_fits.reserve(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                model.item_fits.push_back(stack.middleRows(i * r, r));
            }
            break;
        }
        case ModelKind::EASE: {
            model.ease_b = take("B");
            const auto& offsets = int_arrays.at(0).second;
            const auto& items = int_arrays.at(1).second;
            model.ease_histories.resize(offsets.size() - 1);
            for (std::size_t u = 0; u + 1 < offsets.size(); ++u) {
                for (std::int64_t idx = offsets[u]; idx < offsets[u + 1]; ++idx) {
                    model.ease_histories[u].push_back(static_cast<int>(items[idx]));
                }
            }
            break;
        }
        case ModelKind::TRENDING:
            model.trending_counts = take("counts");
            break;
    }
    return model;
}

}  // namespace tempo
