#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fashionx {

enum class TaskKind {
    style_single,
    style_multi,
    scene_single,
    scene_multi,
    ret_i2t,
    ret_t2i,
    ret_i2i,
    ret_cir,
    attr_color,
    attr_design,
    attr_material,
    assist_global,
    assist_local,
    alignment,
    general_passthrough,
};

std::string to_string(TaskKind t);
TaskKind task_from_string(const std::string& s);

// The thirteen multi-task subtasks, in the fixed corpus order.
const std::vector<TaskKind>& subtask_kinds();
// All kinds including alignment and passthrough bookkeeping kinds.
const std::vector<TaskKind>& all_task_kinds();

struct Template {
    std::string text;
    std::vector<std::string> placeholders;
};

struct TemplatePool {
    TaskKind task = TaskKind::alignment;
    std::vector<Template> questions;
    std::vector<Template> answers;
};

using TemplatePools = std::map<TaskKind, TemplatePool>;

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fills {name} slots; throws TemplateError on an undeclared or unfilled slot.
std::string instantiate(const Template& tmpl, const std::map<std::string, std::string>& slots);

// Placeholder names appearing in the text.
std::set<std::string> placeholders_in(const std::string& text);

// Checks that every placeholder used in a template is declared.
void check_pool(const TemplatePool& pool);

// Default shipped pools (>=10 questions, >=5 answers per templated task).
TemplatePools builtin_template_pools();

TemplatePools load_template_pools(const std::string& path);
void save_template_pools(const TemplatePools& pools, const std::string& path);

}  // namespace fashionx
