// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/cloud/class_schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace gridscan {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

ClassSchema::ClassSchema(std::string name, std::vector<ClassInfo> classes, std::set<ClassId> eval_ignore)
    : name_(std::move(name)), classes_(std::move(classes)), eval_ignore_(std::move(eval_ignore)) {
    if (classes_.empty() || classes_.size() > 256) {
        throw std::invalid_argument("class schema must hold between 1 and 256 classes");
    }
    int noise = 0;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].id != i) {
            throw std::invalid_argument("class ids must be contiguous from 0 (class '" + classes_[i].name + "')");
        }
        if (classes_[i].is_noise) ++noise;
    }
    if (noise > 1) throw std::invalid_argument("at most one class may be the noise class");
    for (ClassId id : eval_ignore_) {
        if (id >= classes_.size()) throw std::invalid_argument("eval_ignore id out of range");
    }
}

std::shared_ptr<const ClassSchema> ClassSchema::ts40k() {
    static const auto schema = std::make_shared<const ClassSchema>(
        "ts40k", std::vector<ClassInfo>{
                     {0, "noise", true, false},
                     {1, "ground", false, false},
                     {2, "low_vegetation", false, false},
                     {3, "medium_vegetation", false, false},
                     {4, "tower", false, true},
                     {5, "power_line", false, true},
                 });
    return schema;
}

std::shared_ptr<const ClassSchema> ClassSchema::tsrgb() {
    static const auto schema = std::make_shared<const ClassSchema>(
        "tsrgb", std::vector<ClassInfo>{
                     {0, "noise", true, false},
                     {1, "vegetation", false, false},
                     {2, "tower", false, true},
                     {3, "power_line", false, true},
                 });
    return schema;
}

std::shared_ptr<const ClassSchema> ClassSchema::builtin(std::string_view name) {
    const auto key = lower(name);
    if (key == "ts40k") return ts40k();
    if (key == "tsrgb" || key == "ts-rgb") return tsrgb();
    throw std::invalid_argument("unknown schema '" + std::string(name) + "' (expected ts40k or tsrgb)");
}

const ClassInfo& ClassSchema::at(ClassId id) const {
    if (id >= classes_.size()) throw std::out_of_range("class id " + std::to_string(id) + " not in schema");
    return classes_[id];
}

std::optional<ClassId> ClassSchema::find(std::string_view class_name) const {
    for (const auto& c : classes_) {
        if (c.name == class_name) return c.id;
    }
    return std::nullopt;
}

std::optional<ClassId> ClassSchema::noise_id() const {
    for (const auto& c : classes_) {
        if (c.is_noise) return c.id;
    }
    return std::nullopt;
}

std::vector<std::string> ClassSchema::class_names() const {
    std::vector<std::string> names;
    names.reserve(classes_.size());
    for (const auto& c : classes_) names.push_back(c.name);
    return names;
}

ClassSchema ClassSchema::with_eval_ignore(std::set<ClassId> ignore) const {
    return ClassSchema(name_, classes_, std::move(ignore));
}

nlohmann::json ClassSchema::to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : classes_) {
        classes.push_back({{"id", c.id}, {"name", c.name}, {"is_noise", c.is_noise}, {"is_critical", c.is_critical}});
    }
    return {{"name", name_}, {"classes", classes}, {"eval_ignore", eval_ignore_}};
}

ClassSchema ClassSchema::from_json(const nlohmann::json& j) {
    std::vector<ClassInfo> classes;
    for (const auto& c : j.at("classes")) {
        classes.push_back({c.at("id").get<ClassId>(), c.at("name").get<std::string>(),
                           c.value("is_noise", false), c.value("is_critical", false)});
    }
    std::set<ClassId> ignore;
    if (j.contains("eval_ignore")) ignore = j.at("eval_ignore").get<std::set<ClassId>>();
    return ClassSchema(j.value("name", std::string{}), std::move(classes), std::move(ignore));
}

std::set<ClassId> resolve_class_set(const ClassSchema& schema, const std::vector<std::string>& names) {
    std::set<ClassId> out;
    for (const auto& n : names) {
        if (auto id = schema.find(n)) {
            out.insert(*id);
            continue;
        }
        int value = -1;
        auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), value);
        if (ec != std::errc{} || ptr != n.data() + n.size() || !schema.contains(value)) {
            throw std::invalid_argument("unknown class '" + n + "' in schema " + schema.name());
        }
        out.insert(static_cast<ClassId>(value));
    }
    return out;
}

}  // namespace gridscan
