// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_CLOUD_CLASS_SCHEMA_HPP
#define GRIDSCAN_CLOUD_CLASS_SCHEMA_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gridscan {

using ClassId = std::uint8_t;

struct ClassInfo {
    ClassId id = 0;
    std::string name;
    bool is_noise = false;
    bool is_critical = false;

    friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

/// Ordered semantic class set. Ids are contiguous from 0 and at most one
/// class is the noise class. `eval_ignore` lists ids left out of aggregate
/// metrics.
class ClassSchema {
public:
    ClassSchema(std::string name, std::vector<ClassInfo> classes, std::set<ClassId> eval_ignore = {});

    /// noise, ground, low_vegetation, medium_vegetation, tower, power_line
    static std::shared_ptr<const ClassSchema> ts40k();
    /// noise, vegetation, tower, power_line
    static std::shared_ptr<const ClassSchema> tsrgb();
    /// Built-in schema by (case-insensitive) name; throws std::invalid_argument.
    static std::shared_ptr<const ClassSchema> builtin(std::string_view name);

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return classes_.size(); }
    const std::vector<ClassInfo>& classes() const noexcept { return classes_; }
    const ClassInfo& at(ClassId id) const;
    bool contains(int id) const noexcept { return id >= 0 && static_cast<std::size_t>(id) < classes_.size(); }
    std::optional<ClassId> find(std::string_view class_name) const;
    std::optional<ClassId> noise_id() const;
    std::vector<std::string> class_names() const;

    const std::set<ClassId>& eval_ignore() const noexcept { return eval_ignore_; }
    ClassSchema with_eval_ignore(std::set<ClassId> ignore) const;

    nlohmann::json to_json() const;
    static ClassSchema from_json(const nlohmann::json& j);

    friend bool operator==(const ClassSchema&, const ClassSchema&) = default;

private:
    std::string name_;
    std::vector<ClassInfo> classes_;
    std::set<ClassId> eval_ignore_;
};

/// Resolves class names or numeric ids (as strings) against a schema.
std::set<ClassId> resolve_class_set(const ClassSchema& schema, const std::vector<std::string>& names);

}  // namespace gridscan

#endif  // GRIDSCAN_CLOUD_CLASS_SCHEMA_HPP
