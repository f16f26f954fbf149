#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epiplan::model {

enum class TemplateId {
    EpidemicTypeExtraction,
    ExtractConditionPoints,
    CaseStructuring,
    TaskListInitial,
    TaskListIterative,
};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> template_from_string(std::string_view name);

using Bindings = std::map<std::string, std::string, std::less<>>;

// Placeholders are written `{snake_case_name}`. Braces that do not enclose a
// bare lowercase identifier (JSON examples, for instance) are literal text.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::set<std::string> placeholders;

    static PromptTemplate make(std::string name, std::string body);
};

std::set<std::string> placeholders_in(std::string_view body);

const PromptTemplate& builtin_template(TemplateId id);
const std::vector<TemplateId>& all_templates();

class MissingBinding : public std::invalid_argument {
public:
    explicit MissingBinding(std::string name)
        : std::invalid_argument("missing binding for placeholder {" + name + "}"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class UnknownPlaceholder : public std::invalid_argument {
public:
    explicit UnknownPlaceholder(std::string name)
        : std::invalid_argument("binding {" + name + "} is not a placeholder of the template"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// Single-pass substitution: text inserted from a binding is never rescanned.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

}  // namespace epiplan::model
