#include "pangle/tools/transform_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "pangle/error.hpp"

namespace pangle::tools {

std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_transform(std::ostream& os, const LinearTransform& transform, const nlohmann::json& config) {
    const Matrix& a = transform.matrix();
    nlohmann::json header;
    header["method"] = to_string(transform.method());
    header["m"] = a.rows();
    header["n"] = a.cols();
    header["seed"] = transform.meta().seed;
    header["config"] = config;
    header["config_hash"] = config_hash(config);
    header["iterations"] = transform.meta().iterations;
    header["final_objective"] = transform.meta().final_objective;
    os << header.dump() << '\n';
    char buf[32];
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), a(i, j));
            (void)ec;
            if (j > 0) os << ',';
            os << std::string_view(buf, p - buf);
        }
        os << '\n';
    }
}

void save_transform(const std::filesystem::path& path, const LinearTransform& transform,
                    const nlohmann::json& config) {
    std::ofstream out(path);
    if (!out) throw Error("save_transform: cannot open " + path.string());
    write_transform(out, transform, config);
    if (!out) throw Error("save_transform: write failed for " + path.string());
}

TransformFile read_transform(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("transform file is empty", 0);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("header is not valid JSON: ") + e.what(), 1);
    }
    Index m = 0;
    Index n = 0;
    TransformMethod method{};
    TrainingMeta meta;
    nlohmann::json config;
    try {
        method = parse_transform_method(header.at("method").get<std::string>());
        m = header.at("m").get<Index>();
        n = header.at("n").get<Index>();
        meta.seed = header.at("seed").get<std::uint64_t>();
        config = header.at("config");
        meta.iterations = header.value("iterations", std::size_t{0});
        meta.final_objective = header.value("final_objective", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("header field: ") + e.what(), 1);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 1);
    }
    if (m < 1 || n < 1) throw ParseError("header shape must be positive", 1);
    const std::string hash = header.value("config_hash", std::string{});
    if (hash != config_hash(config)) throw ParseError("config_hash does not match config", 1);

    Matrix a(m, n);
    for (Index i = 0; i < m; ++i) {
        const std::size_t line_no = static_cast<std::size_t>(i) + 2;
        if (!std::getline(is, line)) throw ParseError("expected " + std::to_string(m) + " matrix rows", line_no);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const char* p = line.data();
        const char* end = p + line.size();
        for (Index j = 0; j < n; ++j) {
            if (j > 0) {
                if (p == end || *p != ',') throw ParseError("expected " + std::to_string(n) + " values", line_no);
                ++p;
            }
            const auto [q, ec] = std::from_chars(p, end, a(i, j));
            if (ec != std::errc{} || !std::isfinite(a(i, j))) {
                throw ParseError("value " + std::to_string(j + 1) + " is not a finite decimal", line_no);
            }
            p = q;
        }
        if (p != end) throw ParseError("more than " + std::to_string(n) + " values", line_no);
    }
    if (std::getline(is, line) && !line.empty()) {
        throw ParseError("trailing content after matrix", static_cast<std::size_t>(m) + 2);
    }
    return TransformFile{LinearTransform(std::move(a), method, std::move(meta)), std::move(config), hash};
}

TransformFile load_transform(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_transform: cannot open " + path.string());
    return read_transform(in);
}

}  // namespace pangle::tools
