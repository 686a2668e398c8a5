#include "slgb/dataset.hpp"

#include "slgb/error.hpp"
#include "slgb/random.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace slgb {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out{ s };
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_missing_token(std::string_view cell) {
    cell = trim(cell);
    return cell.empty() || cell == "?";
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') || (s.front() == '"' && s.back() == '"'))) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string{ s };
}

// One CSV record; quoted fields may span lines. Returns false at end of input.
bool read_csv_record(std::istream &in, std::vector<std::string> &fields, std::size_t &line, std::size_t &record_line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    bool field_quoted = false;
    char c{};
    record_line = line + 1;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && trim(field).empty()) {
            in_quotes = true;
            field_quoted = true;
            field.clear();
        } else if (c == ',') {
            fields.push_back(field_quoted ? field : std::string{ trim(field) });
            field.clear();
            field_quoted = false;
        } else if (c == '\n') {
            ++line;
            fields.push_back(field_quoted ? field : std::string{ trim(field) });
            return true;
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw row_error(record_line, "unterminated quoted field");
    }
    if (!any) {
        return false;
    }
    ++line;
    fields.push_back(field_quoted ? field : std::string{ trim(field) });
    return true;
}

bool blank_record(const std::vector<std::string> &fields) {
    return fields.size() == 1 && fields.front().empty();
}

// Split an ARFF data row on commas, honoring single and double quotes.
std::vector<std::string> split_arff_row(std::string_view row) {
    std::vector<std::string> cells;
    std::string cell;
    char quote = 0;
    for (const char c : row) {
        if (quote != 0) {
            if (c == quote) {
                quote = 0;
            } else {
                cell.push_back(c);
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == ',') {
            cells.emplace_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.emplace_back(trim(cell));
    return cells;
}

struct raw_table {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
};

std::size_t resolve_class_column(const std::vector<std::string> &names, const load_options &options,
                                 const std::optional<std::string> &declared_output) {
    const auto find = [&](const std::string &name) -> std::size_t {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw schema_error("class column '" + name + "' not found in header");
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    if (options.class_column) {
        return find(*options.class_column);
    }
    if (declared_output) {
        return find(*declared_output);
    }
    return names.size() - 1;
}

// Map missing nominal cells onto an explicit "?" category.
void materialize_missing_categories(dataset &d) {
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
        auto &attr = d.schema[a];
        if (!attr.is_nominal()) {
            continue;
        }
        const bool any_missing = std::any_of(d.instances.begin(), d.instances.end(),
                                             [a](const instance &x) { return is_missing(x.values[a]); });
        if (!any_missing) {
            continue;
        }
        attr.values.emplace_back("?");
        const auto code = static_cast<double>(attr.values.size() - 1);
        for (auto &x : d.instances) {
            if (is_missing(x.values[a])) {
                x.values[a] = code;
            }
        }
    }
}

dataset load_csv(std::istream &in, const load_options &options) {
    std::size_t line = 0;
    std::size_t record_line = 0;
    std::vector<std::string> fields;

    raw_table table;
    while (read_csv_record(in, fields, line, record_line)) {
        if (!blank_record(fields)) {
            table.names = fields;
            break;
        }
    }
    if (table.names.empty()) {
        throw schema_error("missing CSV header row");
    }
    if (table.names.size() < 2) {
        throw schema_error("CSV header must declare at least one attribute and the class column");
    }
    for (const auto &name : table.names) {
        if (name.empty()) {
            throw schema_error("empty column name in CSV header (line " + std::to_string(record_line) + ")");
        }
    }
    while (read_csv_record(in, fields, line, record_line)) {
        if (blank_record(fields)) {
            continue;
        }
        if (fields.size() != table.names.size()) {
            throw row_error(record_line, "expected " + std::to_string(table.names.size()) + " cells, found " +
                                             std::to_string(fields.size()));
        }
        table.rows.push_back(fields);
        table.lines.push_back(record_line);
    }
    if (table.rows.empty()) {
        throw empty_dataset_error("dataset has no data rows");
    }

    const std::size_t class_col = resolve_class_column(table.names, options, std::nullopt);
    dataset d;
    d.class_name = table.names[class_col];

    std::vector<std::size_t> attr_cols;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (c == class_col) {
            continue;
        }
        attr_cols.push_back(c);
        attribute_schema attr;
        attr.name = table.names[c];
        const bool numeric = std::all_of(table.rows.begin(), table.rows.end(), [c](const auto &row) {
            return is_missing_token(row[c]) || parse_number(row[c]).has_value();
        });
        const bool any_present = std::any_of(table.rows.begin(), table.rows.end(),
                                             [c](const auto &row) { return !is_missing_token(row[c]); });
        attr.kind = (numeric && any_present) ? attribute_kind::numeric : attribute_kind::nominal;
        d.schema.push_back(std::move(attr));
    }

    d.instances.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        instance x;
        x.values.reserve(attr_cols.size());
        for (std::size_t a = 0; a < attr_cols.size(); ++a) {
            const std::string &cell = row[attr_cols[a]];
            auto &attr = d.schema[a];
            if (is_missing_token(cell)) {
                x.values.push_back(missing_value);
            } else if (attr.is_numeric()) {
                x.values.push_back(*parse_number(cell));
            } else {
                auto idx = attr.value_index(cell);
                if (!idx) {
                    attr.values.push_back(cell);
                    idx = attr.values.size() - 1;
                }
                x.values.push_back(static_cast<double>(*idx));
            }
        }
        const std::string &label = row[class_col];
        if (!is_missing_token(label)) {
            auto it = std::find(d.classes.begin(), d.classes.end(), label);
            if (it == d.classes.end()) {
                d.classes.push_back(label);
                it = d.classes.end() - 1;
            }
            x.label = static_cast<std::size_t>(it - d.classes.begin());
        }
        d.instances.push_back(std::move(x));
    }
    return d;
}

dataset load_arff(std::istream &in, const load_options &options) {
    dataset d;
    std::vector<std::string> names;
    std::vector<attribute_schema> declared;
    std::optional<std::string> declared_output;
    std::size_t line_no = 0;
    std::string line;
    bool in_data = false;

    struct pending_row {
        std::vector<std::string> cells;
        std::size_t line;
    };
    std::vector<pending_row> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '%') {
            continue;
        }
        if (in_data) {
            if (view.front() == '{') {
                throw row_error(line_no, "sparse ARFF rows are not supported");
            }
            rows.push_back({ split_arff_row(view), line_no });
            continue;
        }
        if (view.front() != '@') {
            throw schema_error("unexpected content before @data at line " + std::to_string(line_no));
        }
        const auto space = view.find_first_of(" \t");
        const std::string keyword = to_lower(view.substr(0, space));
        const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(view.substr(space));
        if (keyword == "@relation") {
            d.relation = unquote(rest);
        } else if (keyword == "@attribute") {
            if (rest.empty()) {
                throw schema_error("malformed @attribute at line " + std::to_string(line_no));
            }
            std::string name;
            std::string_view type;
            if (rest.front() == '\'' || rest.front() == '"') {
                const auto close = rest.find(rest.front(), 1);
                if (close == std::string_view::npos) {
                    throw schema_error("unterminated attribute name at line " + std::to_string(line_no));
                }
                name = std::string{ rest.substr(1, close - 1) };
                type = trim(rest.substr(close + 1));
            } else {
                const auto sep = rest.find_first_of(" \t{");
                if (sep == std::string_view::npos) {
                    throw schema_error("attribute without type at line " + std::to_string(line_no));
                }
                name = std::string{ rest.substr(0, sep) };
                type = trim(rest.substr(sep));
            }
            attribute_schema attr;
            attr.name = name;
            if (!type.empty() && type.front() == '{') {
                const auto close = type.rfind('}');
                if (close == std::string_view::npos) {
                    throw schema_error("unterminated nominal domain at line " + std::to_string(line_no));
                }
                attr.kind = attribute_kind::nominal;
                for (auto &v : split_arff_row(type.substr(1, close - 1))) {
                    if (!v.empty()) {
                        attr.values.push_back(v);
                    }
                }
                if (attr.values.empty()) {
                    throw schema_error("empty nominal domain for '" + name + "' at line " + std::to_string(line_no));
                }
            } else {
                const auto type_word = to_lower(type.substr(0, type.find_first_of(" \t[")));
                if (type_word == "numeric" || type_word == "real" || type_word == "integer") {
                    attr.kind = attribute_kind::numeric;
                } else {
                    throw schema_error("unsupported attribute type '" + std::string{ type } + "' at line " +
                                       std::to_string(line_no));
                }
            }
            names.push_back(name);
            declared.push_back(std::move(attr));
        } else if (keyword == "@outputs" || keyword == "@output") {
            declared_output = unquote(rest);
        } else if (keyword == "@inputs" || keyword == "@input") {
            // informational only
        } else if (keyword == "@data") {
            in_data = true;
        } else {
            throw schema_error("unknown header keyword '" + keyword + "' at line " + std::to_string(line_no));
        }
    }
    if (!in_data) {
        throw schema_error("missing @data section");
    }
    if (declared.size() < 2) {
        throw schema_error("at least one attribute and the class must be declared");
    }
    if (rows.empty()) {
        throw empty_dataset_error("dataset has no data rows");
    }

    const std::size_t class_col = resolve_class_column(names, options, declared_output);
    if (!declared[class_col].is_nominal()) {
        throw schema_error("class attribute '" + names[class_col] + "' must be nominal");
    }
    d.class_name = names[class_col];
    d.classes = declared[class_col].values;
    for (std::size_t c = 0; c < declared.size(); ++c) {
        if (c != class_col) {
            d.schema.push_back(declared[c]);
        }
    }

    for (const auto &row : rows) {
        if (row.cells.size() != declared.size()) {
            throw row_error(row.line, "expected " + std::to_string(declared.size()) + " cells, found " +
                                          std::to_string(row.cells.size()));
        }
        instance x;
        std::size_t a = 0;
        for (std::size_t c = 0; c < declared.size(); ++c) {
            const std::string &cell = row.cells[c];
            if (c == class_col) {
                if (!is_missing_token(cell)) {
                    const auto idx = declared[c].value_index(cell);
                    if (!idx) {
                        throw row_error(row.line, "undeclared class value '" + cell + "'");
                    }
                    x.label = *idx;
                }
                continue;
            }
            const auto &attr = d.schema[a++];
            if (is_missing_token(cell)) {
                x.values.push_back(missing_value);
            } else if (attr.is_numeric()) {
                // unparseable numeric cells are recorded as missing
                x.values.push_back(parse_number(cell).value_or(missing_value));
            } else {
                const auto idx = attr.value_index(cell);
                if (!idx) {
                    throw row_error(row.line, "value '" + cell + "' not in domain of '" + attr.name + "'");
                }
                x.values.push_back(static_cast<double>(*idx));
            }
        }
        d.instances.push_back(std::move(x));
    }
    return d;
}

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos && trim(s).size() == s.size()) {
        return std::string{ s };
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out += '"';
    return out;
}

std::string arff_escape(std::string_view s) {
    if (s.find_first_of(" \t,{}'\"%") == std::string_view::npos && !s.empty()) {
        return std::string{ s };
    }
    std::string out = "'";
    for (const char c : s) {
        if (c != '\'') {
            out.push_back(c);
        }
    }
    out += '\'';
    return out;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_cell(const attribute_schema &attr, double v, bool arff) {
    if (is_missing(v)) {
        return "?";
    }
    if (attr.is_numeric()) {
        return format_number(v);
    }
    const auto &name = attr.values.at(static_cast<std::size_t>(v));
    return arff ? arff_escape(name) : csv_escape(name);
}

// Largest-remainder apportionment of `total` over `sizes`; ties go to the lower index.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t> &sizes) {
    const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{ 0 });
    std::vector<std::size_t> quota(sizes.size(), 0);
    if (n == 0) {
        return quota;
    }
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        const double exact = static_cast<double>(total) * static_cast<double>(sizes[c]) / static_cast<double>(n);
        quota[c] = std::min(sizes[c], static_cast<std::size_t>(std::floor(exact + 1e-9)));
        assigned += quota[c];
        remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first + 1e-12; });
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k) {
        const auto c = remainders[k].second;
        if (quota[c] < sizes[c]) {
            ++quota[c];
            ++assigned;
        }
    }
    return quota;
}

// Rows grouped by class, each group shuffled.
std::vector<std::vector<std::size_t>> shuffled_groups(const dataset &d, std::span<const std::size_t> rows, rng &gen) {
    std::vector<std::vector<std::size_t>> groups(d.num_classes());
    for (const auto r : rows) {
        groups[*d.instances[r].label].push_back(r);
    }
    for (auto &g : groups) {
        gen.shuffle(std::span<std::size_t>{ g });
    }
    return groups;
}

struct stratified_take {
    std::vector<std::size_t> taken;
    std::vector<std::size_t> rest;
    std::vector<std::string> warnings;
};

// Take a stratified sample of `count` rows; optionally guarantee one row per class.
stratified_take take_stratified(const dataset &d, std::span<const std::size_t> rows, std::size_t count, bool min_one,
                                rng &gen) {
    auto groups = shuffled_groups(d, rows, gen);
    std::vector<std::size_t> sizes;
    for (const auto &g : groups) {
        sizes.push_back(g.size());
    }
    auto quota = apportion(count, sizes);
    stratified_take out;
    if (min_one && count > 0) {
        for (std::size_t c = 0; c < groups.size(); ++c) {
            if (!groups[c].empty() && quota[c] == 0) {
                quota[c] = 1;
                out.warnings.push_back("class '" + d.classes[c] +
                                       "' received no labeled instance at this ratio; one was enforced");
            }
        }
    }
    for (std::size_t c = 0; c < groups.size(); ++c) {
        for (std::size_t k = 0; k < groups[c].size(); ++k) {
            (k < quota[c] ? out.taken : out.rest).push_back(groups[c][k]);
        }
    }
    std::sort(out.taken.begin(), out.taken.end());
    std::sort(out.rest.begin(), out.rest.end());
    return out;
}

void require_labeled(const dataset &d) {
    if (!d.fully_labeled()) {
        throw configuration_error("splits require a fully labeled dataset");
    }
    if (d.empty()) {
        throw empty_dataset_error("cannot split an empty dataset");
    }
}

void fill_split(const dataset &d, semi_supervised_split &split) {
    split.labeled = d.subset(split.labeled_rows);
    split.unlabeled = d.subset(split.unlabeled_rows);
    split.test = d.subset(split.test_rows);
    split.hidden_labels.clear();
    for (auto &x : split.unlabeled.instances) {
        split.hidden_labels.push_back(*x.label);
        x.label.reset();
    }
}

std::size_t round_count(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
}

}  // namespace

std::optional<std::size_t> attribute_schema::value_index(std::string_view value) const {
    const auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - values.begin());
}

void attribute_schema::validate() const {
    if (is_nominal()) {
        if (values.empty()) {
            throw schema_error("nominal attribute '" + name + "' has an empty domain");
        }
        auto sorted = values;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw schema_error("nominal attribute '" + name + "' has duplicate values");
        }
    } else if (min > max) {
        throw schema_error("numeric attribute '" + name + "' has min > max");
    }
}

bool operator==(const instance &lhs, const instance &rhs) {
    if (lhs.label != rhs.label || lhs.weight != rhs.weight || lhs.values.size() != rhs.values.size()) {
        return false;
    }
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        const double a = lhs.values[i];
        const double b = rhs.values[i];
        if (!(a == b || (is_missing(a) && is_missing(b)))) {
            return false;
        }
    }
    return true;
}

bool dataset::fully_labeled() const noexcept {
    return std::all_of(instances.begin(), instances.end(), [](const instance &x) { return x.label.has_value(); });
}

bool dataset::fully_unlabeled() const noexcept {
    return std::none_of(instances.begin(), instances.end(), [](const instance &x) { return x.label.has_value(); });
}

std::vector<std::size_t> dataset::class_counts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto &x : instances) {
        if (x.label) {
            ++counts.at(*x.label);
        }
    }
    return counts;
}

dataset dataset::subset(std::span<const std::size_t> rows) const {
    dataset out = empty_like();
    out.instances.reserve(rows.size());
    for (const auto r : rows) {
        out.instances.push_back(instances.at(r));
    }
    return out;
}

dataset dataset::empty_like() const {
    dataset out;
    out.relation = relation;
    out.class_name = class_name;
    out.schema = schema;
    out.classes = classes;
    return out;
}

bool dataset::same_schema(const dataset &other) const {
    if (classes != other.classes || schema.size() != other.schema.size()) {
        return false;
    }
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (schema[a].name != other.schema[a].name || schema[a].kind != other.schema[a].kind ||
            schema[a].values != other.schema[a].values) {
            return false;
        }
    }
    return true;
}

void dataset::validate() const {
    if (classes.size() < 2) {
        throw schema_error("a dataset must declare at least 2 classes");
    }
    for (const auto &attr : schema) {
        attr.validate();
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto &x = instances[i];
        if (x.values.size() != schema.size()) {
            throw schema_error("instance " + std::to_string(i) + " has " + std::to_string(x.values.size()) +
                               " values for " + std::to_string(schema.size()) + " attributes");
        }
        if (x.label && *x.label >= classes.size()) {
            throw schema_error("instance " + std::to_string(i) + " has an undeclared class");
        }
        if (!(x.weight >= 0.0)) {
            throw schema_error("instance " + std::to_string(i) + " has a negative weight");
        }
        for (std::size_t a = 0; a < schema.size(); ++a) {
            const double v = x.values[a];
            if (schema[a].is_nominal() && !is_missing(v) &&
                (v < 0.0 || v >= static_cast<double>(schema[a].values.size()) || v != std::floor(v))) {
                throw schema_error("instance " + std::to_string(i) + " has an invalid nominal code for '" +
                                   schema[a].name + "'");
            }
        }
    }
}

dataset load_dataset(std::istream &in, data_format format, const load_options &options) {
    dataset d = format == data_format::csv ? load_csv(in, options) : load_arff(in, options);
    materialize_missing_categories(d);
    refresh_ranges(d);
    d.validate();
    return d;
}

data_format format_from_path(std::string_view path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string_view::npos ? std::string{} : to_lower(path.substr(dot));
    return (ext == ".arff" || ext == ".dat") ? data_format::keel_arff : data_format::csv;
}

dataset load_dataset_file(const std::string &path, const load_options &options) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw error("cannot open dataset file '" + path + "'");
    }
    dataset d = load_dataset(in, format_from_path(path), options);
    if (d.relation == "data") {
        const auto slash = path.find_last_of("/\\");
        auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
        d.relation = stem.substr(0, stem.rfind('.'));
    }
    return d;
}

void write_dataset(std::ostream &out, const dataset &d, data_format format) {
    if (format == data_format::csv) {
        for (const auto &attr : d.schema) {
            out << csv_escape(attr.name) << ',';
        }
        out << csv_escape(d.class_name) << '\n';
        for (const auto &x : d.instances) {
            for (std::size_t a = 0; a < d.schema.size(); ++a) {
                out << format_cell(d.schema[a], x.values[a], false) << ',';
            }
            out << (x.label ? csv_escape(d.classes[*x.label]) : std::string{ "?" }) << '\n';
        }
        return;
    }
    out << "@relation " << arff_escape(d.relation) << '\n';
    for (const auto &attr : d.schema) {
        out << "@attribute " << arff_escape(attr.name) << ' ';
        if (attr.is_numeric()) {
            out << "real\n";
        } else {
            out << '{';
            for (std::size_t v = 0; v < attr.values.size(); ++v) {
                out << (v ? "," : "") << arff_escape(attr.values[v]);
            }
            out << "}\n";
        }
    }
    out << "@attribute " << arff_escape(d.class_name) << " {";
    for (std::size_t c = 0; c < d.classes.size(); ++c) {
        out << (c ? "," : "") << arff_escape(d.classes[c]);
    }
    out << "}\n@data\n";
    for (const auto &x : d.instances) {
        for (std::size_t a = 0; a < d.schema.size(); ++a) {
            out << format_cell(d.schema[a], x.values[a], true) << ',';
        }
        out << (x.label ? arff_escape(d.classes[*x.label]) : std::string{ "?" }) << '\n';
    }
}

void refresh_ranges(dataset &d) {
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
        auto &attr = d.schema[a];
        if (!attr.is_numeric()) {
            continue;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto &x : d.instances) {
            const double v = x.values[a];
            if (!is_missing(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (lo > hi) {
            lo = hi = 0.0;
        }
        attr.min = lo;
        attr.max = hi;
    }
}

dataset normalize_numeric(dataset d) {
    refresh_ranges(d);
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
        auto &attr = d.schema[a];
        if (!attr.is_numeric()) {
            continue;
        }
        const double lo = attr.min;
        const double span = attr.max - attr.min;
        for (auto &x : d.instances) {
            double &v = x.values[a];
            if (is_missing(v)) {
                continue;
            }
            v = span > 0.0 ? (v - lo) / span : 0.0;
        }
        attr.min = 0.0;
        attr.max = span > 0.0 ? 1.0 : 0.0;
    }
    return d;
}

mean_imputer mean_imputer::fit(const dataset &training) {
    const dataset *parts[] = { &training };
    return fit(parts);
}

mean_imputer mean_imputer::fit(std::span<const dataset *const> training) {
    mean_imputer imp;
    if (training.empty()) {
        return imp;
    }
    const auto &schema = training.front()->schema;
    imp.means_.assign(schema.size(), missing_value);
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (!schema[a].is_numeric()) {
            continue;
        }
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto *part : training) {
            for (const auto &x : part->instances) {
                if (!is_missing(x.values[a])) {
                    sum += x.values[a];
                    ++n;
                }
            }
        }
        imp.means_[a] = n > 0 ? sum / static_cast<double>(n) : 0.0;
    }
    return imp;
}

dataset mean_imputer::apply(dataset d) const {
    for (auto &x : d.instances) {
        for (std::size_t a = 0; a < means_.size() && a < x.values.size(); ++a) {
            if (d.schema[a].is_numeric() && is_missing(x.values[a])) {
                x.values[a] = means_[a];
            }
        }
    }
    return d;
}

semi_supervised_split make_split(const dataset &d, double ratio, std::uint64_t seed, std::size_t fold,
                                 std::size_t folds) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw parameter_error("labeled ratio must lie in (0,1)");
    }
    if (folds < 2 || fold >= folds) {
        throw parameter_error("fold index must be below the fold count (≥ 2)");
    }
    require_labeled(d);

    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), std::size_t{ 0 });

    // Fold assignment is shared by every fold index of the same seed.
    rng fold_gen{ mix_seed(seed, 0x5EED, folds) };
    const auto groups = shuffled_groups(d, all, fold_gen);
    semi_supervised_split split;
    split.ratio = ratio;
    std::vector<std::size_t> training;
    std::size_t position = 0;
    for (const auto &g : groups) {
        for (const auto r : g) {
            ((position++ % folds) == fold ? split.test_rows : training).push_back(r);
        }
    }
    std::sort(split.test_rows.begin(), split.test_rows.end());
    std::sort(training.begin(), training.end());

    rng label_gen{ mix_seed(seed, 0x1ABE1, fold) };
    auto take = take_stratified(d, training, round_count(ratio, training.size()), true, label_gen);
    split.labeled_rows = std::move(take.taken);
    split.unlabeled_rows = std::move(take.rest);
    split.warnings = std::move(take.warnings);
    fill_split(d, split);
    return split;
}

semi_supervised_split make_grid_split(const dataset &d, double labeled_frac, double unlabeled_frac,
                                      std::uint64_t seed) {
    if (!(labeled_frac > 0.0 && labeled_frac <= 1.0)) {
        throw parameter_error("labeled fraction must lie in (0,1]");
    }
    if (!(unlabeled_frac >= 0.0 && unlabeled_frac <= 1.0)) {
        throw parameter_error("unlabeled fraction must lie in [0,1]");
    }
    require_labeled(d);

    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), std::size_t{ 0 });
    rng gen{ mix_seed(seed, 0x6121D) };

    auto test = take_stratified(d, all, round_count(0.2, d.size()), false, gen);
    auto pools = take_stratified(d, test.rest, round_count(0.4, d.size()), false, gen);

    semi_supervised_split split;
    split.ratio = labeled_frac;
    split.test_rows = std::move(test.taken);

    rng pick_gen{ mix_seed(seed, 0x9001) };
    auto labeled = take_stratified(d, pools.taken, round_count(labeled_frac, pools.taken.size()), true, pick_gen);
    auto unlabeled = take_stratified(d, pools.rest, round_count(unlabeled_frac, pools.rest.size()), false, pick_gen);
    split.labeled_rows = std::move(labeled.taken);
    split.unlabeled_rows = std::move(unlabeled.taken);
    split.warnings = std::move(labeled.warnings);
    fill_split(d, split);
    return split;
}

std::vector<std::size_t> labels_of(const dataset &d) {
    std::vector<std::size_t> out;
    out.reserve(d.size());
    for (const auto &x : d.instances) {
        if (!x.label) {
            throw configuration_error("expected a fully labeled dataset");
        }
        out.push_back(*x.label);
    }
    return out;
}

}  // namespace slgb
