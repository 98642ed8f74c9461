// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include <nlohmann/json.hpp>

#include "../detail/byte_io.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"

namespace gridscan {

namespace {

constexpr std::string_view kMagic = "GSC1";

static_assert(sizeof(Vec3) == 3 * sizeof(double));
static_assert(sizeof(Normal3) == 3 * sizeof(float));
static_assert(sizeof(Rgb) == 3);

struct Column {
    const char* name;
    const char* type;
    int components;
    std::size_t scalar_bytes;
};

constexpr Column kPositions{"positions", "float64", 3, 8};
constexpr Column kRgb{"rgb", "uint8", 3, 1};
constexpr Column kIntensity{"intensity", "float32", 1, 4};
constexpr Column kNormals{"normals", "float32", 3, 4};
constexpr Column kLabels{"labels", "uint8", 1, 1};

template <class T>
void put_scalars(std::string& out, const T* values, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) detail::put_le(out, values[i]);
}

template <class T>
void get_scalars(const char* p, T* values, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) values[i] = detail::get_le<T>(p + i * sizeof(T));
}

}  // namespace

std::string write_cache_bytes(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    std::vector<Column> columns{kPositions};
    if (cloud.has_rgb()) columns.push_back(kRgb);
    if (cloud.has_intensity()) columns.push_back(kIntensity);
    if (cloud.has_normals()) columns.push_back(kNormals);
    if (cloud.has_labels()) columns.push_back(kLabels);

    nlohmann::json meta;
    meta["point_count"] = n;
    nlohmann::json attrs = nlohmann::json::array();
    std::size_t payload = 0;
    for (const auto& c : columns) {
        const std::size_t bytes = n * c.components * c.scalar_bytes;
        attrs.push_back({{"name", c.name}, {"type", c.type}, {"components", c.components}, {"bytes", bytes}});
        payload += bytes;
    }
    meta["attributes"] = attrs;
    meta["payload_bytes"] = payload;
    meta["schema"] = cloud.schema() ? cloud.schema()->to_json() : nlohmann::json(nullptr);
    const std::string meta_text = meta.dump();

    std::string out;
    out.reserve(kMagic.size() + 8 + meta_text.size() + payload);
    out += kMagic;
    detail::put_le<std::uint64_t>(out, meta_text.size());
    out += meta_text;

    const auto& a = cloud.attributes();
    if (n > 0) {
        put_scalars(out, a.positions.front().data(), 3 * n);
        if (a.rgb) out.append(reinterpret_cast<const char*>(a.rgb->data()), 3 * n);
        if (a.intensity) put_scalars(out, a.intensity->data(), n);
        if (a.normals) put_scalars(out, a.normals->front().data(), 3 * n);
        if (a.labels) out.append(reinterpret_cast<const char*>(a.labels->data()), n);
    }
    return out;
}

PointCloud parse_cache(std::string_view bytes) {
    if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
        throw DataError("bad magic: not a GSC1 cache file");
    }
    if (bytes.size() < kMagic.size() + 8) throw TruncatedError(kMagic.size() + 8, bytes.size(), "GSC1 header");
    const auto meta_len = detail::get_le<std::uint64_t>(bytes.data() + kMagic.size());
    const std::size_t meta_begin = kMagic.size() + 8;
    if (meta_len > bytes.size() - meta_begin) {
        throw TruncatedError(meta_begin + meta_len, bytes.size(), "GSC1 metadata block");
    }
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(meta_begin, meta_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("GSC1 metadata is not valid JSON: ") + e.what());
    }

    std::size_t n = 0;
    std::vector<std::string> names;
    std::size_t declared = 0;
    std::shared_ptr<const ClassSchema> schema;
    try {
        n = meta.at("point_count").get<std::size_t>();
        for (const auto& a : meta.at("attributes")) {
            names.push_back(a.at("name").get<std::string>());
            declared += a.at("bytes").get<std::size_t>();
        }
        if (!meta.at("schema").is_null()) {
            schema = std::make_shared<const ClassSchema>(ClassSchema::from_json(meta.at("schema")));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("GSC1 metadata incomplete: ") + e.what());
    }

    const std::size_t payload_begin = meta_begin + meta_len;
    const std::size_t actual = bytes.size() - payload_begin;
    std::size_t expected = 0;
    for (const auto& name : names) {
        if (name == kPositions.name || name == kNormals.name || name == kRgb.name) {
            expected += n * 3 * (name == kPositions.name ? 8 : name == kNormals.name ? 4 : 1);
        } else if (name == kIntensity.name) {
            expected += n * 4;
        } else if (name == kLabels.name) {
            expected += n;
        } else {
            throw DataError("GSC1 metadata names unknown attribute '" + name + "'");
        }
    }
    if (expected != declared || actual != expected) {
        throw DataError("GSC1 metadata/payload length mismatch: metadata implies " + std::to_string(expected) +
                        " bytes, payload holds " + std::to_string(actual));
    }
    if (names.empty() || names.front() != kPositions.name) throw DataError("GSC1 cache lacks positions");

    CloudAttributes attrs;
    const char* p = bytes.data() + payload_begin;
    for (const auto& name : names) {
        if (name == kPositions.name) {
            attrs.positions.resize(n);
            if (n) get_scalars(p, attrs.positions.front().data(), 3 * n);
            p += n * 24;
        } else if (name == kRgb.name) {
            attrs.rgb.emplace(n);
            std::memcpy(attrs.rgb->data(), p, 3 * n);
            p += 3 * n;
        } else if (name == kIntensity.name) {
            attrs.intensity.emplace(n);
            get_scalars(p, attrs.intensity->data(), n);
            p += 4 * n;
        } else if (name == kNormals.name) {
            attrs.normals.emplace(n);
            if (n) get_scalars(p, attrs.normals->front().data(), 3 * n);
            p += 12 * n;
        } else if (name == kLabels.name) {
            attrs.labels.emplace(n);
            std::memcpy(attrs.labels->data(), p, n);
            p += n;
        }
    }
    return PointCloud(std::move(attrs), std::move(schema));
}

PointCloud read_cache(const std::filesystem::path& path) { return parse_cache(read_file(path)); }

void write_cache(const PointCloud& cloud, const std::filesystem::path& path) {
    write_file(path, write_cache_bytes(cloud));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::string bytes;
    in.seekg(0, std::ios::end);
    bytes.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0, std::ios::beg);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw std::runtime_error("failed reading '" + path.string() + "'");
    return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

CloudFormat format_from_name(std::string_view name) {
    if (name == "xyz" || name == "txt") return CloudFormat::xyz;
    if (name == "ply") return CloudFormat::ply;
    if (name == "gsc" || name == "cache") return CloudFormat::cache;
    throw std::invalid_argument("unknown cloud format '" + std::string(name) + "'");
}

CloudFormat detect_format(const std::filesystem::path& path, std::string_view head) {
    if (head.substr(0, kMagic.size()) == kMagic) return CloudFormat::cache;
    if (head.substr(0, 4) == "ply\n" || head.substr(0, 5) == "ply\r\n") return CloudFormat::ply;
    auto ext = path.extension().string();
    if (!ext.empty()) ext.erase(0, 1);
    if (ext == "ply") return CloudFormat::ply;
    if (ext == "gsc") return CloudFormat::cache;
    return CloudFormat::xyz;
}

namespace {

PointCloud decode(std::string_view bytes, CloudFormat format, std::shared_ptr<const ClassSchema> schema) {
    switch (format) {
        case CloudFormat::cache: {
            auto cloud = parse_cache(bytes);
            return schema ? cloud.with_schema(std::move(schema)) : cloud;
        }
        case CloudFormat::ply: return parse_ply(bytes, std::move(schema)).cloud;
        case CloudFormat::xyz: return parse_xyz(bytes, std::move(schema));
    }
    return {};
}

}  // namespace

PointCloud load_cloud(const std::filesystem::path& path, std::shared_ptr<const ClassSchema> schema) {
    const std::string bytes = read_file(path);
    return decode(bytes, detect_format(path, bytes), std::move(schema));
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format,
                      std::shared_ptr<const ClassSchema> schema) {
    return decode(read_file(path), format, std::move(schema));
}

}  // namespace gridscan
