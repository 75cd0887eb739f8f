#include "resonance/model_io.hpp"

#include "resonance/error.hpp"

#include <fstream>
#include <set>

namespace resonance {

namespace {

using nlohmann::json;

double real_entry(const json& value, const std::string& where)
{
    if (value.is_number())
        return value.get<double>();
    if (value.is_array() || value.is_object())
        fail(ErrorCode::NonSymmetricDot, where + " must be real; complex entries are rejected");
    fail(ErrorCode::InvalidInput, where + " must be a number");
}

std::size_t site_index(const json& value, std::size_t n_sites, const std::string& where)
{
    if (!value.is_number_integer())
        fail(ErrorCode::InvalidInput, where + " must be an integer");
    const auto raw = value.get<long long>();
    if (raw < 1 || static_cast<std::size_t>(raw) > n_sites)
        fail(ErrorCode::BadSiteIndex,
             where + " = " + std::to_string(raw) + " outside [1, " + std::to_string(n_sites) + "]");
    return static_cast<std::size_t>(raw - 1);
}

const json& required(const json& doc, const char* key)
{
    if (!doc.contains(key))
        fail(ErrorCode::InvalidInput, std::string("missing key '") + key + "'");
    return doc.at(key);
}

}  // namespace

ModelConfig config_from_json(const json& doc)
{
    if (!doc.is_object())
        fail(ErrorCode::InvalidInput, "model must be a JSON object");
    ModelConfig config;

    if (doc.contains("dot_matrix")) {
        const auto& rows = doc.at("dot_matrix");
        if (!rows.is_array() || rows.empty())
            fail(ErrorCode::InvalidInput, "dot_matrix must be a non-empty array of rows");
        const auto n = rows.size();
        Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (!rows[i].is_array() || rows[i].size() != n)
                fail(ErrorCode::InvalidInput, "dot_matrix must be square");
            for (std::size_t j = 0; j < n; ++j)
                h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = real_entry(
                    rows[i][j], "dot_matrix[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
        }
        config.n_sites = n;
        config.dot_matrix = std::move(h);
        if (doc.contains("n_sites") && doc.at("n_sites") != json(n))
            fail(ErrorCode::InvalidInput, "n_sites disagrees with dot_matrix size");
    } else {
        const auto& n_json = required(doc, "n_sites");
        if (!n_json.is_number_integer() || n_json.get<long long>() < 1)
            fail(ErrorCode::InvalidInput, "n_sites must be a positive integer");
        config.n_sites = n_json.get<std::size_t>();
        const auto& eps = required(doc, "epsilon");
        if (!eps.is_array())
            fail(ErrorCode::InvalidInput, "epsilon must be an array");
        for (std::size_t i = 0; i < eps.size(); ++i)
            config.epsilon.push_back(real_entry(eps[i], "epsilon[" + std::to_string(i + 1) + "]"));
        if (doc.contains("hoppings")) {
            const auto& hops = doc.at("hoppings");
            if (!hops.is_array())
                fail(ErrorCode::InvalidInput, "hoppings must be an array");
            for (const auto& hop : hops) {
                Hopping h;
                h.i = site_index(required(hop, "i"), config.n_sites, "hopping i");
                h.j = site_index(required(hop, "j"), config.n_sites, "hopping j");
                h.t = real_entry(required(hop, "t"), "hopping t");
                config.hoppings.push_back(h);
            }
        }
    }

    const auto& leads = required(doc, "leads");
    if (!leads.is_array())
        fail(ErrorCode::InvalidInput, "leads must be an array");
    std::set<std::string> labels;
    for (std::size_t a = 0; a < leads.size(); ++a) {
        const auto& entry = leads[a];
        LeadAttachment lead;
        lead.site = site_index(required(entry, "site"), config.n_sites, "lead site");
        lead.coupling = real_entry(required(entry, "coupling"), "lead coupling");
        lead.label = entry.contains("label") ? entry.at("label").get<std::string>()
                                             : "lead" + std::to_string(a + 1);
        // "dot" tags dot rows in packet output; ',' and ':' are element separators in the CLI.
        if (lead.label.empty() || lead.label == "dot" || lead.label.find_first_of(",:") != std::string::npos)
            fail(ErrorCode::InvalidInput, "lead label '" + lead.label + "' is reserved or contains ',' or ':'");
        if (!labels.insert(lead.label).second)
            fail(ErrorCode::InvalidInput, "duplicate lead label '" + lead.label + "'");
        config.leads.push_back(std::move(lead));
    }
    return config;
}

OpenLatticeModel model_from_json(const json& doc)
{
    return build_model(config_from_json(doc));
}

OpenLatticeModel load_model_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::InvalidInput, "cannot open model file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, "malformed JSON in " + path.string() + ": " + e.what());
    }
    try {
        return model_from_json(doc);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, std::string("bad model field: ") + e.what());
    }
}

json model_to_json(const OpenLatticeModel& model)
{
    const auto& h = model.dot_matrix();
    const auto n = model.n_sites();
    json doc;
    doc["n_sites"] = n;
    json eps = json::array();
    json hops = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        eps.push_back(h(ii, ii));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = h(ii, static_cast<Eigen::Index>(j));
            if (v != 0.0)
                hops.push_back({{"i", i + 1}, {"j", j + 1}, {"t", -v}});
        }
    }
    doc["epsilon"] = eps;
    doc["hoppings"] = hops;
    json leads = json::array();
    for (const auto& lead : model.leads())
        leads.push_back({{"site", lead.site + 1}, {"coupling", lead.coupling}, {"label", lead.label}});
    doc["leads"] = leads;
    return doc;
}

}  // namespace resonance
