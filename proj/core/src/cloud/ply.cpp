// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <optional>

#include "../detail/byte_io.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"

namespace gridscan {

namespace {

enum class Scalar { i8, u8, i16, u16, i32, u32, f32, f64 };

std::size_t scalar_size(Scalar t) {
    switch (t) {
        case Scalar::i8:
        case Scalar::u8: return 1;
        case Scalar::i16:
        case Scalar::u16: return 2;
        case Scalar::i32:
        case Scalar::u32:
        case Scalar::f32: return 4;
        case Scalar::f64: return 8;
    }
    return 0;
}

bool is_integer(Scalar t) { return t != Scalar::f32 && t != Scalar::f64; }

std::optional<Scalar> scalar_from_name(std::string_view n) {
    if (n == "char" || n == "int8") return Scalar::i8;
    if (n == "uchar" || n == "uint8") return Scalar::u8;
    if (n == "short" || n == "int16") return Scalar::i16;
    if (n == "ushort" || n == "uint16") return Scalar::u16;
    if (n == "int" || n == "int32") return Scalar::i32;
    if (n == "uint" || n == "uint32") return Scalar::u32;
    if (n == "float" || n == "float32") return Scalar::f32;
    if (n == "double" || n == "float64") return Scalar::f64;
    return std::nullopt;
}

struct Property {
    std::string name;
    Scalar type = Scalar::f32;
    bool is_list = false;
    Scalar count_type = Scalar::u8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;

    bool fixed_size() const {
        for (const auto& p : properties) {
            if (p.is_list) return false;
        }
        return true;
    }
    std::size_t stride() const {
        std::size_t s = 0;
        for (const auto& p : properties) s += scalar_size(p.type);
        return s;
    }
};

struct Header {
    bool binary = false;
    std::vector<Element> elements;
    std::vector<std::string> comments;
    std::size_t body_offset = 0;
};

std::vector<std::string_view> words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

Header parse_header(std::string_view bytes) {
    Header h;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_format = false;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (pos >= bytes.size()) return std::nullopt;
        const auto eol = bytes.find('\n', pos);
        if (eol == std::string_view::npos) return std::nullopt;
        auto line = detail::trim(bytes.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        return line;
    };

    auto first = next_line();
    if (!first || *first != "ply") throw DataError("not a PLY file: missing 'ply' magic line");

    while (true) {
        auto line = next_line();
        if (!line) throw DataError("PLY header has no end_header line");
        const auto w = words(*line);
        if (w.empty()) continue;
        if (w[0] == "end_header") break;
        if (w[0] == "comment" || w[0] == "obj_info") {
            const auto rest = line->substr(std::min(line->size(), w[0].size() + 1));
            if (w[0] == "comment") h.comments.emplace_back(detail::trim(rest));
            continue;
        }
        if (w[0] == "format") {
            if (w.size() != 3 || w[2] != "1.0") throw ParseError(line_no, "garbled PLY format line");
            if (w[1] == "ascii") {
                h.binary = false;
            } else if (w[1] == "binary_little_endian") {
                h.binary = true;
            } else if (w[1] == "binary_big_endian") {
                throw DataError("unsupported PLY format binary_big_endian");
            } else {
                throw DataError("unsupported PLY format '" + std::string(w[1]) + "'");
            }
            saw_format = true;
            continue;
        }
        if (w[0] == "element") {
            std::size_t count = 0;
            if (w.size() != 3 || !detail::parse_number(w[2], count)) {
                throw ParseError(line_no, "garbled PLY element line");
            }
            h.elements.push_back({std::string(w[1]), count, {}});
            continue;
        }
        if (w[0] == "property") {
            if (h.elements.empty()) throw ParseError(line_no, "PLY property before any element");
            Property p;
            if (w.size() == 5 && w[1] == "list") {
                auto ct = scalar_from_name(w[2]);
                auto it = scalar_from_name(w[3]);
                if (!ct || !it || !is_integer(*ct)) throw ParseError(line_no, "garbled PLY list property");
                p = {std::string(w[4]), *it, true, *ct};
            } else if (w.size() == 3) {
                auto t = scalar_from_name(w[1]);
                if (!t) throw ParseError(line_no, "unknown PLY property type '" + std::string(w[1]) + "'");
                p = {std::string(w[2]), *t, false, Scalar::u8};
            } else {
                throw ParseError(line_no, "garbled PLY property line");
            }
            h.elements.back().properties.push_back(std::move(p));
            continue;
        }
        throw ParseError(line_no, "unexpected PLY header keyword '" + std::string(w[0]) + "'");
    }
    if (!saw_format) throw DataError("PLY header has no format line");
    h.body_offset = pos;
    return h;
}

struct EndOfBody {};

/// Sequential reader over the body; every value comes back as double, which
/// represents all PLY scalar types exactly.
class BodyReader {
public:
    BodyReader(std::string_view body, bool binary) : body_(body), binary_(binary) {}

    double read(Scalar t) { return binary_ ? read_binary(t) : read_ascii(t); }

    /// Ascii rows are line-delimited; call at the start of every element instance.
    void begin_row() {
        if (binary_) return;
        while (true) {
            if (pos_ >= body_.size()) throw EndOfBody{};
            auto eol = body_.find('\n', pos_);
            if (eol == std::string_view::npos) eol = body_.size();
            row_ = detail::trim(body_.substr(pos_, eol - pos_));
            pos_ = eol + 1;
            ++row_no_;
            if (!row_.empty()) break;
        }
    }

    std::size_t consumed() const { return std::min(pos_, body_.size()); }
    std::size_t available() const { return body_.size(); }
    std::size_t row_no() const { return row_no_; }

private:
    double read_binary(Scalar t) {
        const auto n = scalar_size(t);
        if (pos_ + n > body_.size()) throw EndOfBody{};
        const char* p = body_.data() + pos_;
        pos_ += n;
        switch (t) {
            case Scalar::i8: return detail::get_le<std::int8_t>(p);
            case Scalar::u8: return detail::get_le<std::uint8_t>(p);
            case Scalar::i16: return detail::get_le<std::int16_t>(p);
            case Scalar::u16: return detail::get_le<std::uint16_t>(p);
            case Scalar::i32: return detail::get_le<std::int32_t>(p);
            case Scalar::u32: return detail::get_le<std::uint32_t>(p);
            case Scalar::f32: return detail::get_le<float>(p);
            case Scalar::f64: return detail::get_le<double>(p);
        }
        return 0.0;
    }

    double read_ascii(Scalar t) {
        while (!row_.empty() && (row_.front() == ' ' || row_.front() == '\t')) row_.remove_prefix(1);
        std::size_t end = 0;
        while (end < row_.size() && row_[end] != ' ' && row_[end] != '\t') ++end;
        const auto token = row_.substr(0, end);
        row_.remove_prefix(end);
        if (token.empty()) throw ParseError(row_no_, "PLY row has too few values");
        bool ok = false;
        double value = 0.0;
        if (t == Scalar::f32) {
            float f = 0.0f;
            ok = detail::parse_number(token, f);
            value = f;
        } else if (t == Scalar::f64) {
            ok = detail::parse_number(token, value);
        } else {
            long long v = 0;
            ok = detail::parse_number(token, v);
            value = static_cast<double>(v);
        }
        if (!ok) throw ParseError(row_no_, "bad PLY value '" + std::string(token) + "'");
        return value;
    }

    std::string_view body_;
    bool binary_;
    std::size_t pos_ = 0;
    std::string_view row_;
    std::size_t row_no_ = 0;
};

void skip_instance(BodyReader& r, const Element& e) {
    r.begin_row();
    for (const auto& p : e.properties) {
        if (p.is_list) {
            const auto n = static_cast<std::size_t>(r.read(p.count_type));
            for (std::size_t k = 0; k < n; ++k) r.read(p.type);
        } else {
            r.read(p.type);
        }
    }
}

enum class Role { skip, x, y, z, red, green, blue, nx, ny, nz, intensity, label };

Role role_of(const std::string& name) {
    if (name == "x") return Role::x;
    if (name == "y") return Role::y;
    if (name == "z") return Role::z;
    if (name == "red") return Role::red;
    if (name == "green") return Role::green;
    if (name == "blue") return Role::blue;
    if (name == "nx") return Role::nx;
    if (name == "ny") return Role::ny;
    if (name == "nz") return Role::nz;
    if (name == "intensity" || name == "scalar_Intensity") return Role::intensity;
    if (name == "label" || name == "class" || name == "classification" || name == "scalar_Classification") {
        return Role::label;
    }
    return Role::skip;
}

constexpr const char* kSchemaComment = "schema ";

}  // namespace

PlyReadResult parse_ply(std::string_view bytes, std::shared_ptr<const ClassSchema> schema) {
    const Header header = parse_header(bytes);
    PlyReadResult result;

    if (!schema) {
        for (const auto& c : header.comments) {
            if (c.rfind(kSchemaComment, 0) == 0) {
                try {
                    schema = ClassSchema::builtin(detail::trim(c.substr(std::string_view(kSchemaComment).size())));
                } catch (const std::invalid_argument&) {
                    result.warnings.push_back("unknown schema comment '" + c + "' ignored");
                }
            }
        }
    }

    std::size_t vertex_element = header.elements.size();
    for (std::size_t i = 0; i < header.elements.size(); ++i) {
        if (header.elements[i].name == "vertex") {
            vertex_element = i;
            break;
        }
    }
    if (vertex_element == header.elements.size()) throw DataError("PLY file has no vertex element");
    const Element& vertex = header.elements[vertex_element];

    std::vector<Role> roles;
    std::array<int, 12> seen{};
    for (const auto& p : vertex.properties) {
        Role role = p.is_list ? Role::skip : role_of(p.name);
        if (role == Role::red || role == Role::green || role == Role::blue) {
            if (p.type != Scalar::u8) {
                result.warnings.push_back("color property '" + p.name + "' is not uchar; skipped");
                role = Role::skip;
            }
        }
        if (role == Role::label && !is_integer(p.type)) {
            // CloudCompare writes classification as float; accepted when integral.
            result.warnings.push_back("label property '" + p.name + "' stored as floating point");
        }
        if (role != Role::skip && seen[static_cast<int>(role)]++) {
            result.warnings.push_back("duplicate property '" + p.name + "' skipped");
            role = Role::skip;
        }
        if (role == Role::skip) result.warnings.push_back("unrecognized vertex property '" + p.name + "' skipped");
        roles.push_back(role);
    }
    auto has = [&](Role r) { return seen[static_cast<int>(r)] > 0; };
    if (!has(Role::x) || !has(Role::y) || !has(Role::z)) throw DataError("PLY vertex element lacks x, y or z");
    const bool want_rgb = has(Role::red) && has(Role::green) && has(Role::blue);
    const bool want_normals = has(Role::nx) && has(Role::ny) && has(Role::nz);
    if (!want_rgb && (has(Role::red) || has(Role::green) || has(Role::blue))) {
        result.warnings.push_back("incomplete red/green/blue set ignored");
    }
    if (!want_normals && (has(Role::nx) || has(Role::ny) || has(Role::nz))) {
        result.warnings.push_back("incomplete nx/ny/nz set ignored");
    }

    const std::string_view body = bytes.substr(header.body_offset);
    BodyReader reader(body, header.binary);

    std::size_t prefix_bytes = 0;
    for (std::size_t e = 0; e < vertex_element; ++e) {
        const auto& el = header.elements[e];
        try {
            for (std::size_t i = 0; i < el.count; ++i) skip_instance(reader, el);
        } catch (const EndOfBody&) {
            throw DataError("PLY body truncated inside element '" + el.name + "'");
        }
    }
    prefix_bytes = reader.consumed();

    if (header.binary && vertex.fixed_size()) {
        const std::size_t expected = vertex.count * vertex.stride();
        const std::size_t actual = body.size() - prefix_bytes;
        if (actual < expected) throw TruncatedError(expected, actual, "PLY vertex payload truncated");
    }

    CloudAttributes attrs;
    attrs.positions.resize(vertex.count);
    if (want_rgb) attrs.rgb.emplace(vertex.count);
    if (want_normals) attrs.normals.emplace(vertex.count);
    if (has(Role::intensity)) attrs.intensity.emplace(vertex.count);
    if (has(Role::label)) attrs.labels.emplace(vertex.count);

    std::size_t renormalized = 0;
    bool drop_normals = false;
    for (std::size_t i = 0; i < vertex.count; ++i) {
        Eigen::Vector3d n = Eigen::Vector3d::Zero();
        std::array<double, 3> color{};
        try {
            reader.begin_row();
            for (std::size_t k = 0; k < vertex.properties.size(); ++k) {
                const auto& p = vertex.properties[k];
                if (p.is_list) {
                    const auto cnt = static_cast<std::size_t>(reader.read(p.count_type));
                    for (std::size_t j = 0; j < cnt; ++j) reader.read(p.type);
                    continue;
                }
                const double v = reader.read(p.type);
                switch (roles[k]) {
                    case Role::x: attrs.positions[i].x() = v; break;
                    case Role::y: attrs.positions[i].y() = v; break;
                    case Role::z: attrs.positions[i].z() = v; break;
                    case Role::red: color[0] = v; break;
                    case Role::green: color[1] = v; break;
                    case Role::blue: color[2] = v; break;
                    case Role::nx: n.x() = v; break;
                    case Role::ny: n.y() = v; break;
                    case Role::nz: n.z() = v; break;
                    case Role::intensity: (*attrs.intensity)[i] = static_cast<float>(v); break;
                    case Role::label:
                        if (v < 0 || v > 255 || v != std::floor(v)) {
                            throw DataError("PLY vertex " + std::to_string(i) + " has invalid label value");
                        }
                        (*attrs.labels)[i] = static_cast<ClassId>(v);
                        break;
                    case Role::skip: break;
                }
            }
        } catch (const EndOfBody&) {
            if (header.binary) {
                throw TruncatedError(vertex.count * vertex.stride(), body.size() - prefix_bytes,
                                     "PLY vertex payload truncated");
            }
            throw TruncatedError(vertex.count, i, "PLY vertex rows truncated", "vertex rows");
        }
        if (!attrs.positions[i].allFinite()) {
            throw DataError("PLY vertex " + std::to_string(i) + " has a non-finite coordinate");
        }
        if (want_rgb) {
            (*attrs.rgb)[i] = {static_cast<std::uint8_t>(color[0]), static_cast<std::uint8_t>(color[1]),
                               static_cast<std::uint8_t>(color[2])};
        }
        if (want_normals && !drop_normals) {
            Normal3 nf = n.cast<float>();
            const double norm = nf.cast<double>().norm();
            if (!std::isfinite(norm) || norm == 0.0) {
                drop_normals = true;
            } else if (std::abs(norm - 1.0) > 1e-6) {
                nf = (n / n.norm()).cast<float>();
                ++renormalized;
            }
            (*attrs.normals)[i] = nf;
        }
    }
    if (drop_normals) {
        attrs.normals.reset();
        result.warnings.push_back("normals contain zero or non-finite vectors; normals dropped");
    } else if (renormalized > 0) {
        result.warnings.push_back(std::to_string(renormalized) + " non-unit normals renormalized");
    }

    result.cloud = PointCloud(std::move(attrs), std::move(schema));
    return result;
}

std::string write_ply(const PointCloud& cloud, PlyEncoding encoding) {
    const bool binary = encoding == PlyEncoding::binary_little_endian;
    std::string out;
    out += "ply\n";
    out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
    out += "comment generated by gridscan\n";
    if (const auto& s = cloud.schema(); s && (s->name() == "ts40k" || s->name() == "tsrgb")) {
        if (*s == *ClassSchema::builtin(s->name())) out += std::string("comment ") + kSchemaComment + s->name() + "\n";
    }
    out += "element vertex " + std::to_string(cloud.size()) + "\n";
    out += "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_rgb()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    if (cloud.has_normals()) out += "property float nx\nproperty float ny\nproperty float nz\n";
    if (cloud.has_intensity()) out += "property float intensity\n";
    if (cloud.has_labels()) out += "property uchar label\n";
    out += "end_header\n";

    std::size_t record = 24 + (cloud.has_rgb() ? 3 : 0) + (cloud.has_normals() ? 12 : 0) +
                         (cloud.has_intensity() ? 4 : 0) + (cloud.has_labels() ? 1 : 0);
    out.reserve(out.size() + cloud.size() * (binary ? record : record * 3));

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.position(i);
        if (binary) {
            detail::put_le(out, p.x());
            detail::put_le(out, p.y());
            detail::put_le(out, p.z());
            if (cloud.has_rgb()) {
                const auto c = cloud.rgb()[i];
                detail::put_le(out, c.r);
                detail::put_le(out, c.g);
                detail::put_le(out, c.b);
            }
            if (cloud.has_normals()) {
                const auto& n = cloud.normals()[i];
                detail::put_le(out, n.x());
                detail::put_le(out, n.y());
                detail::put_le(out, n.z());
            }
            if (cloud.has_intensity()) detail::put_le(out, cloud.intensity()[i]);
            if (cloud.has_labels()) detail::put_le(out, cloud.labels()[i]);
            continue;
        }
        detail::put_number(out, p.x());
        out.push_back(' ');
        detail::put_number(out, p.y());
        out.push_back(' ');
        detail::put_number(out, p.z());
        if (cloud.has_rgb()) {
            const auto c = cloud.rgb()[i];
            for (int v : {int{c.r}, int{c.g}, int{c.b}}) {
                out.push_back(' ');
                detail::put_number(out, v);
            }
        }
        if (cloud.has_normals()) {
            const auto& n = cloud.normals()[i];
            for (int k = 0; k < 3; ++k) {
                out.push_back(' ');
                detail::put_number(out, n[k]);
            }
        }
        if (cloud.has_intensity()) {
            out.push_back(' ');
            detail::put_number(out, cloud.intensity()[i]);
        }
        if (cloud.has_labels()) {
            out.push_back(' ');
            detail::put_number(out, int{cloud.labels()[i]});
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace gridscan
