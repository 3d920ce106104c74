#include "fashionx/templates.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace fashionx {

using nlohmann::json;

std::string to_string(TaskKind t) {
    switch (t) {
        case TaskKind::style_single: return "style_single";
        case TaskKind::style_multi: return "style_multi";
        case TaskKind::scene_single: return "scene_single";
        case TaskKind::scene_multi: return "scene_multi";
        case TaskKind::ret_i2t: return "ret_i2t";
        case TaskKind::ret_t2i: return "ret_t2i";
        case TaskKind::ret_i2i: return "ret_i2i";
        case TaskKind::ret_cir: return "ret_cir";
        case TaskKind::attr_color: return "attr_color";
        case TaskKind::attr_design: return "attr_design";
        case TaskKind::attr_material: return "attr_material";
        case TaskKind::assist_global: return "assist_global";
        case TaskKind::assist_local: return "assist_local";
        case TaskKind::alignment: return "alignment";
        case TaskKind::general_passthrough: return "general_passthrough";
    }
    return "?";
}

TaskKind task_from_string(const std::string& s) {
    for (TaskKind t : all_task_kinds()) {
        if (to_string(t) == s) return t;
    }
    throw TemplateError("unknown task kind: " + s);
}

const std::vector<TaskKind>& subtask_kinds() {
    static const std::vector<TaskKind> kinds = {
        TaskKind::style_single, TaskKind::style_multi,  TaskKind::scene_single,
        TaskKind::scene_multi,  TaskKind::ret_i2t,      TaskKind::ret_t2i,
        TaskKind::ret_i2i,      TaskKind::ret_cir,      TaskKind::attr_color,
        TaskKind::attr_design,  TaskKind::attr_material, TaskKind::assist_global,
        TaskKind::assist_local};
    return kinds;
}

const std::vector<TaskKind>& all_task_kinds() {
    static const std::vector<TaskKind> kinds = [] {
        std::vector<TaskKind> all = {TaskKind::alignment};
        for (TaskKind t : subtask_kinds()) all.push_back(t);
        all.push_back(TaskKind::general_passthrough);
        return all;
    }();
    return kinds;
}

std::set<std::string> placeholders_in(const std::string& text) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        auto end = text.find('}', i);
        if (end == std::string::npos) break;
        names.insert(text.substr(i + 1, end - i - 1));
        i = end;
    }
    return names;
}

std::string instantiate(const Template& tmpl, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.text.size());
    for (std::size_t i = 0; i < tmpl.text.size(); ++i) {
        if (tmpl.text[i] != '{') {
            out.push_back(tmpl.text[i]);
            continue;
        }
        auto end = tmpl.text.find('}', i);
        if (end == std::string::npos) throw TemplateError("unterminated placeholder in template");
        std::string name = tmpl.text.substr(i + 1, end - i - 1);
        auto it = slots.find(name);
        if (it == slots.end()) throw TemplateError("unfilled placeholder: " + name);
        out += it->second;
        i = end;
    }
    return out;
}

void check_pool(const TemplatePool& pool) {
    auto check = [&](const std::vector<Template>& templates, const char* kind) {
        if (templates.empty()) {
            throw TemplateError("pool " + to_string(pool.task) + " has no " + kind + " templates");
        }
        for (const auto& t : templates) {
            std::set<std::string> declared(t.placeholders.begin(), t.placeholders.end());
            for (const auto& name : placeholders_in(t.text)) {
                if (!declared.count(name)) {
                    throw TemplateError("pool " + to_string(pool.task) + ": placeholder '" + name +
                                        "' used but not declared");
                }
            }
        }
    };
    check(pool.questions, "question");
    check(pool.answers, "answer");
}

namespace {

Template t(std::string text) {
    Template tmpl;
    tmpl.text = std::move(text);
    for (const auto& name : placeholders_in(tmpl.text)) tmpl.placeholders.push_back(name);
    return tmpl;
}

TemplatePool pool(TaskKind task, std::vector<Template> questions, std::vector<Template> answers) {
    TemplatePool p;
    p.task = task;
    p.questions = std::move(questions);
    p.answers = std::move(answers);
    check_pool(p);
    return p;
}

}  // namespace

TemplatePools builtin_template_pools() {
    TemplatePools pools;

    pools[TaskKind::alignment] = pool(
        TaskKind::alignment,
        {t("Describe the outfit in this image."),
         t("What is the person wearing in this picture?"),
         t("Give a detailed description of the clothing shown."),
         t("Please describe the garments visible in the image."),
         t("Walk me through what this outfit consists of."),
         t("Can you describe the look in this photo?"),
         t("Summarize the outfit shown in the image."),
         t("What garments and details do you see in this outfit?"),
         t("Tell me about the clothing in this image."),
         t("Provide a description of the outfit pictured here.")},
        {t("{description}"), t("Sure. {description}"), t("This outfit features the following: {description}"),
         t("Here is the outfit: {description}"), t("Certainly: {description}")});

    pools[TaskKind::style_single] = pool(
        TaskKind::style_single,
        {t("What is the overall style of this outfit?"),
         t("How would you characterize the style of this look as a whole?"),
         t("Which style best describes the entire outfit?"),
         t("Describe the overall fashion style of this outfit."),
         t("In one or two words, what style is this outfit overall?"),
         t("What is the style of the {category} ({term}) in this image?"),
         t("How would you describe the style of the {term} worn as the {category}?"),
         t("Which style does the {category} item '{term}' convey?"),
         t("Looking only at the {category} ({term}), what is its style?"),
         t("What fashion style is the {term} ({category}) in this outfit?")},
        {t("{style}"), t("The style is {style}."), t("It looks {style}."),
         t("I would call it {style}."), t("This reads as {style}.")});

    pools[TaskKind::style_multi] = pool(
        TaskKind::style_multi,
        {t("Which of these outfits best matches the style '{style}'? {options}"),
         t("Among the candidates, which image shows a '{style}' outfit? {options}"),
         t("Pick the image whose outfit is best described as {style}. {options}"),
         t("Which option has a {style} look? {options}"),
         t("Identify the {style} outfit among these images. {options}"),
         t("Of the images shown, which one is styled as {style}? {options}"),
         t("Which candidate image fits the style {style}? {options}"),
         t("Select the image that best embodies a {style} style. {options}"),
         t("From these outfits, which matches {style}? {options}"),
         t("Which image would you label as {style}? {options}")},
        {t("Image {position}"), t("The answer is Image {position}."), t("Image {position} matches."),
         t("That would be Image {position}."), t("Option: Image {position}")});

    pools[TaskKind::scene_single] = pool(
        TaskKind::scene_single,
        {t("For what occasion is this outfit suitable?"),
         t("Where would this outfit be appropriate to wear?"),
         t("What scene or setting fits this outfit best?"),
         t("Which occasion does this look suit?"),
         t("Name an occasion this outfit works for."),
         t("What kind of event would this outfit be worn to?"),
         t("In what setting would this outfit be appropriate?"),
         t("What occasion comes to mind for this outfit?"),
         t("Which scenario matches this outfit?"),
         t("What is the most fitting occasion for this look?")},
        {t("{occasion}"), t("It suits a {occasion} setting."), t("This works for {occasion}."),
         t("I would wear it for {occasion}."), t("A good fit for {occasion}.")});

    pools[TaskKind::scene_multi] = pool(
        TaskKind::scene_multi,
        {t("Which of these outfits is best suited for '{occasion}'? {options}"),
         t("Among the candidates, which image fits the occasion '{occasion}'? {options}"),
         t("Pick the outfit most appropriate for {occasion}. {options}"),
         t("Which option would you wear for {occasion}? {options}"),
         t("Identify the outfit that matches the scene: {occasion}. {options}"),
         t("Of the images shown, which suits {occasion}? {options}"),
         t("Which candidate is dressed for {occasion}? {options}"),
         t("Select the image appropriate for a {occasion} setting. {options}"),
         t("From these outfits, which works for {occasion}? {options}"),
         t("Which image shows an outfit fit for {occasion}? {options}")},
        {t("Image {position}"), t("The answer is Image {position}."), t("Image {position} fits."),
         t("That would be Image {position}."), t("Option: Image {position}")});

    pools[TaskKind::ret_i2t] = pool(
        TaskKind::ret_i2t,
        {t("Which description matches the outfit in the image? {options}"),
         t("Select the description that aligns with this outfit. {options}"),
         t("Which of the following texts describes the pictured outfit? {options}"),
         t("Match the image to the correct description. {options}"),
         t("Which caption fits the outfit shown? {options}"),
         t("Pick the text that corresponds to this image. {options}"),
         t("Which description best captures this outfit? {options}"),
         t("Identify the correct description for the image. {options}"),
         t("Which option describes what the person is wearing? {options}"),
         t("Choose the description matching the outfit. {options}")},
        {t("Option {position}"), t("The answer is Option {position}."),
         t("Option {position}: {description}"), t("That would be Option {position}."),
         t("{description}")});

    pools[TaskKind::ret_t2i] = pool(
        TaskKind::ret_t2i,
        {t("Which image matches this description: \"{description}\"? {options}"),
         t("Find the image that fits the description: \"{description}\". {options}"),
         t("Given the description \"{description}\", which image corresponds to it? {options}"),
         t("Select the outfit image described by: \"{description}\". {options}"),
         t("Which candidate image shows: \"{description}\"? {options}"),
         t("Match the text \"{description}\" to the correct image. {options}"),
         t("Which image depicts the outfit described as \"{description}\"? {options}"),
         t("Identify the image corresponding to: \"{description}\". {options}"),
         t("Which of these images fits \"{description}\"? {options}"),
         t("Pick the image that the description \"{description}\" refers to. {options}")},
        {t("Image {position}"), t("The answer is Image {position}."), t("Image {position} matches."),
         t("That would be Image {position}."), t("Option: Image {position}")});

    pools[TaskKind::ret_i2i] = pool(
        TaskKind::ret_i2i,
        {t("The first image is the query. Which of the other images shows the same garment? {options}"),
         t("Which candidate image depicts the same item as the query (first) image? {options}"),
         t("Find the image showing the same garment as the first image. {options}"),
         t("Which of the candidates matches the query outfit in the first image? {options}"),
         t("The query outfit is shown first. Which image is the same item? {options}"),
         t("Select the candidate that depicts the same garment as the query image. {options}"),
         t("Which image shows another view of the query (first) item? {options}"),
         t("Match the query image to its counterpart among the candidates. {options}"),
         t("Which option is the same garment as in the first image? {options}"),
         t("Identify the duplicate of the query garment among the candidates. {options}")},
        {t("Image {position}"), t("The answer is Image {position}."), t("Image {position} is the same item."),
         t("That would be Image {position}."), t("Option: Image {position}")});

    pools[TaskKind::ret_cir] = pool(
        TaskKind::ret_cir,
        {t("Describe the differences between the outfits in these two images."),
         t("What changed between the first and the second outfit?"),
         t("Compare the two outfits and list their differences."),
         t("How does the second outfit differ from the first?"),
         t("Point out the attribute differences between these two looks."),
         t("What are the garment-level differences between the two images?"),
         t("List what is different between outfit one and outfit two."),
         t("Articulate the differences between these two outfits."),
         t("Which attributes differ between the first and second image?"),
         t("Summarize the changes from the first outfit to the second.")},
        {t("{differences}"), t("The differences are: {differences}"),
         t("Compared with the first outfit: {differences}"), t("Changes: {differences}"),
         t("Here is what differs: {differences}")});

    pools[TaskKind::attr_color] = pool(
        TaskKind::attr_color,
        {t("What color is the {term} ({category}) in this image?"),
         t("Which color does the {category} item '{term}' have?"),
         t("Tell me the color of the {term} worn as the {category}."),
         t("What is the color of the {category} ({term})?"),
         t("Describe the color of the {term} in this outfit."),
         t("Looking at the {category}, what color is the {term}?"),
         t("Identify the color of the {term} ({category})."),
         t("What shade is the {category} item '{term}'?"),
         t("Which color best describes the {term} ({category})?"),
         t("Name the color of the {term} worn as {category}.")},
        {t("{value}"), t("The color is {value}."), t("It is {value}."),
         t("That item is {value}."), t("I would say {value}.")});

    pools[TaskKind::attr_design] = pool(
        TaskKind::attr_design,
        {t("What design details does the {term} ({category}) have?"),
         t("Describe the design of the {category} item '{term}'."),
         t("Which design elements are present on the {term} ({category})?"),
         t("Tell me about the design details of the {term} worn as the {category}."),
         t("What design features does the {category} ({term}) show?"),
         t("How is the {term} ({category}) designed?"),
         t("Identify the design details of the {term} ({category})."),
         t("What construction or design details mark the {category} item '{term}'?"),
         t("Describe the notable design of the {term} in this outfit ({category})."),
         t("Which design details characterize the {term} ({category})?")},
        {t("{value}"), t("The design features {value}."), t("It has {value}."),
         t("Notable design: {value}."), t("You can see {value}.")});

    pools[TaskKind::attr_material] = pool(
        TaskKind::attr_material,
        {t("What material is the {term} ({category}) made of?"),
         t("Which fabric does the {category} item '{term}' use?"),
         t("Tell me the material of the {term} worn as the {category}."),
         t("What is the {category} ({term}) made from?"),
         t("Describe the material of the {term} in this outfit."),
         t("Looking at the {category}, what material is the {term}?"),
         t("Identify the fabric of the {term} ({category})."),
         t("What is the {term} ({category}) fabricated from?"),
         t("Which material best describes the {term} ({category})?"),
         t("Name the material of the {term} worn as {category}.")},
        {t("{value}"), t("The material is {value}."), t("It is made of {value}."),
         t("That item is {value}."), t("I would say {value}.")});

    pools[TaskKind::assist_global] = pool(
        TaskKind::assist_global,
        {t("Is this outfit suitable for {occasion}?"),
         t("Would this outfit work for a {occasion} setting?"),
         t("Could someone wear this outfit to {occasion}?"),
         t("Does this look fit the occasion '{occasion}'?"),
         t("Is this an appropriate outfit for {occasion}?"),
         t("Is this outfit suitable for {season} wear?"),
         t("Would this outfit be comfortable in {season}?"),
         t("Is this look appropriate for the {season} season?"),
         t("Does this outfit fit {season} weather?"),
         t("Would you wear this outfit in {season}?")},
        {t("{answer}"), t("{answer}."), t("{answer}, it is."), t("{answer}, definitely."),
         t("{answer} indeed.")});

    pools[TaskKind::assist_local] = pool(
        TaskKind::assist_local,
        {t("Does any garment in this outfit come in {color}?"),
         t("Is there a {color} item in this outfit?"),
         t("Does this outfit include anything {color}?"),
         t("Can you spot a {color} garment here?"),
         t("Is {color} one of the colors worn in this outfit?"),
         t("Does any garment feature the design detail '{design}'?"),
         t("Is there an item with {design} in this outfit?"),
         t("Does this outfit include a piece showing {design}?"),
         t("Can you find {design} on any garment here?"),
         t("Is {design} present in this outfit's design details?")},
        {t("{answer}"), t("{answer}."), t("{answer}, it does."), t("{answer}, there is."),
         t("{answer} indeed.")});

    return pools;
}

TemplatePools load_template_pools(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot open template pools file: " + path);
    json j = json::parse(in);
    TemplatePools pools;
    for (const auto& p : j.at("pools")) {
        TemplatePool pool;
        pool.task = task_from_string(p.at("task").get<std::string>());
        for (const auto& q : p.at("questions")) {
            Template tmpl;
            tmpl.text = q.at("text").get<std::string>();
            tmpl.placeholders = q.at("placeholders").get<std::vector<std::string>>();
            pool.questions.push_back(std::move(tmpl));
        }
        for (const auto& a : p.at("answers")) {
            Template tmpl;
            tmpl.text = a.at("text").get<std::string>();
            tmpl.placeholders = a.at("placeholders").get<std::vector<std::string>>();
            pool.answers.push_back(std::move(tmpl));
        }
        check_pool(pool);
        pools[pool.task] = std::move(pool);
    }
    return pools;
}

void save_template_pools(const TemplatePools& pools, const std::string& path) {
    json j;
    j["pools"] = json::array();
    for (const auto& [task, pool] : pools) {
        json p;
        p["task"] = to_string(task);
        p["questions"] = json::array();
        for (const auto& q : pool.questions) {
            p["questions"].push_back({{"text", q.text}, {"placeholders", q.placeholders}});
        }
        p["answers"] = json::array();
        for (const auto& a : pool.answers) {
            p["answers"].push_back({{"text", a.text}, {"placeholders", a.placeholders}});
        }
        j["pools"].push_back(std::move(p));
    }
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace fashionx
