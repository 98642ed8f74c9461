// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>

#include "../detail/byte_io.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"

namespace gridscan {

namespace {

std::size_t split_tokens(std::string_view line, std::array<std::string_view, 8>& tokens) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (count < tokens.size()) tokens[count] = line.substr(start, i - start);
        ++count;
    }
    return count;
}

int integer_field(std::string_view token, std::size_t line_no, int lo, int hi, const char* what) {
    int value = 0;
    if (!detail::parse_number(token, value)) {
        throw ParseError(line_no, "bad token '" + std::string(token) + "' for " + what);
    }
    if (value < lo || value > hi) {
        throw ParseError(line_no, std::string(what) + " " + std::to_string(value) + " outside [" +
                                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return value;
}

}  // namespace

PointCloud parse_xyz(std::string_view text, std::shared_ptr<const ClassSchema> schema) {
    CloudAttributes attrs;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    std::array<std::string_view, 8> tok{};

    while (!text.empty()) {
        const auto eol = text.find('\n');
        const auto line = detail::trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        const std::size_t count = split_tokens(line, tok);
        if (columns == 0) {
            if (count != 3 && count != 4 && count != 6 && count != 7) {
                throw ParseError(line_no, "unsupported column count " + std::to_string(count) +
                                              " (expected 3, 4, 6 or 7)");
            }
            columns = count;
            if (columns >= 6) attrs.rgb.emplace();
            if (columns == 4 || columns == 7) attrs.labels.emplace();
        } else if (count != columns) {
            throw ParseError(line_no, "inconsistent column count " + std::to_string(count) + ", expected " +
                                          std::to_string(columns));
        }

        Vec3 p;
        for (int k = 0; k < 3; ++k) {
            double v = 0.0;
            if (!detail::parse_number(tok[k], v) || !std::isfinite(v)) {
                throw ParseError(line_no, "bad token '" + std::string(tok[k]) + "'");
            }
            p[k] = v;
        }
        attrs.positions.push_back(p);
        if (attrs.rgb) {
            attrs.rgb->push_back({static_cast<std::uint8_t>(integer_field(tok[3], line_no, 0, 255, "color")),
                                  static_cast<std::uint8_t>(integer_field(tok[4], line_no, 0, 255, "color")),
                                  static_cast<std::uint8_t>(integer_field(tok[5], line_no, 0, 255, "color"))});
        }
        if (attrs.labels) {
            attrs.labels->push_back(
                static_cast<ClassId>(integer_field(tok[columns - 1], line_no, 0, 255, "label")));
        }
    }
    return PointCloud(std::move(attrs), std::move(schema));
}

std::string write_xyz(const PointCloud& cloud) {
    std::string out;
    out.reserve(cloud.size() * 64);
    char buf[32];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.position(i);
        for (int k = 0; k < 3; ++k) {
            if (k) out.push_back(' ');
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p[k], std::chars_format::general, 17);
            out.append(buf, ptr);
        }
        if (cloud.has_rgb()) {
            const auto c = cloud.rgb()[i];
            for (int v : {int{c.r}, int{c.g}, int{c.b}}) {
                out.push_back(' ');
                detail::put_number(out, v);
            }
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
