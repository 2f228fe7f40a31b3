#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "delphinet/bn/network.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/error.hpp"

// XMLBIF 0.3 interchange. Only variables, outcomes, structure and tables
// survive a round trip; annotations are dropped on export and defaulted on
// import. Tables list the defined variable's states fastest, then the GIVEN
// variables with the last one varying fastest, which matches our row layout.

namespace delphinet::bn {

namespace detail {

inline std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline VariableKind infer_kind(const std::vector<std::string>& states) {
  if (states == std::vector<std::string>{"True", "False"}) return VariableKind::Boolean;
  if (states.size() == 2) return VariableKind::Binary;
  return VariableKind::Unordered;
}

}  // namespace detail

inline BayesianNetwork read_xmlbif(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::InvalidDocument, std::string("malformed XMLBIF: ") + e.what());
  }
  auto network = tree.get_child_optional("BIF.NETWORK");
  if (!network) throw Error(ErrorCode::InvalidDocument, "XMLBIF document has no BIF/NETWORK element");

  BayesianNetwork net;
  net.name = detail::trimmed(network->get("NAME", ""));
  for (const auto& [tag, node] : *network) {
    if (tag != "VARIABLE") continue;
    Variable v;
    v.name = detail::trimmed(node.get("NAME", ""));
    v.id = v.name;
    for (const auto& [t, outcome] : node) {
      if (t == "OUTCOME") v.states.push_back(detail::trimmed(outcome.data()));
    }
    v.kind = detail::infer_kind(v.states);
    net = add_variable(std::move(net), std::move(v));
  }
  for (const auto& [tag, node] : *network) {
    if (tag != "DEFINITION" && tag != "PROBABILITY") continue;
    std::string child = detail::trimmed(node.get("FOR", ""));
    const std::string id = net.resolve(child).id;
    const std::size_t width = net.resolve(child).states.size();
    std::vector<std::string> given;
    for (const auto& [t, g] : node) {
      if (t == "GIVEN") given.push_back(detail::trimmed(g.data()));
    }
    for (const auto& g : given) {
      Arrow arrow{net.resolve(g).id, id, ""};
      net = add_arrow(std::move(net), std::move(arrow));
    }
    std::istringstream table(node.get("TABLE", ""));
    std::vector<double> values;
    for (double x; table >> x;) values.push_back(x);
    const std::size_t rows = net.cpt(id).rows.size();
    if (values.size() != rows * width) {
      throw Error(ErrorCode::InvalidDocument, "TABLE for '" + child + "' has " +
                                                  std::to_string(values.size()) + " entries, expected " +
                                                  std::to_string(rows * width));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(values.begin() + static_cast<std::ptrdiff_t>(r * width),
                              values.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
      net = set_cpt_row(std::move(net), id, r, row);
    }
  }
  return net;
}

inline BayesianNetwork read_xmlbif_string(const std::string& text) {
  std::istringstream in(text);
  return read_xmlbif(in);
}

/// Unspecified cells are written as their completed values.
inline std::string write_xmlbif(const BayesianNetwork& input) {
  BayesianNetwork net = complete_cpt(input);
  auto esc = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  };
  std::ostringstream out;
  out.precision(17);
  out << "<?xml version=\"1.0\"?>\n<BIF VERSION=\"0.3\">\n<NETWORK>\n";
  out << "<NAME>" << esc(net.name) << "</NAME>\n";
  for (const auto& v : net.variables) {
    out << "<VARIABLE TYPE=\"nature\">\n  <NAME>" << esc(v.name) << "</NAME>\n";
    for (const auto& s : v.states) out << "  <OUTCOME>" << esc(s) << "</OUTCOME>\n";
    out << "</VARIABLE>\n";
  }
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const auto& cpt = net.cpts[i];
    out << "<DEFINITION>\n  <FOR>" << esc(net.variables[i].name) << "</FOR>\n";
    for (const auto& p : cpt.parents) out << "  <GIVEN>" << esc(net.require(p).name) << "</GIVEN>\n";
    out << "  <TABLE>";
    bool first = true;
    for (const auto& row : cpt.rows) {
      for (const auto& cell : row) {
        out << (first ? "" : " ") << *cell;
        first = false;
      }
    }
    out << "</TABLE>\n</DEFINITION>\n";
  }
  out << "</NETWORK>\n</BIF>\n";
  return out.str();
}

}  // namespace delphinet::bn
