// SPDX-License-Identifier: Apache-2.0

#include "tfasim/association.hpp"

#include <cstdio>
#include <stdexcept>

namespace tfasim::assoc {

int ActivationVector::num_served() const
{
    int n = 0;
    for (int a : assignment)
        n += (a != kUnserved) ? 1 : 0;
    return n;
}

void ActivationMatrix::validate() const
{
    if (columns.empty())
        return;
    const std::size_t k = columns.front().assignment.size();
    for (const ActivationVector& col : columns)
        if (col.assignment.size() != k)
            throw std::invalid_argument("activation matrix columns disagree on the number of users");
}

FeasibilityReport feasible(const ActivationVector& activation, const std::vector<int>& stream_demands,
                           const std::vector<int>& capacities)
{
    if (stream_demands.size() != activation.assignment.size())
        throw std::invalid_argument("stream demand vector does not match the number of users");

    std::vector<int> load(capacities.size(), 0);
    for (std::size_t k = 0; k < activation.assignment.size(); ++k)
    {
        int j = activation.assignment[k];
        if (j == ActivationVector::kUnserved)
            continue;
        if (j < 0 || j >= static_cast<int>(capacities.size()))
            throw std::invalid_argument("activation refers to a BS index out of range");
        load[j] += stream_demands[k];
    }

    FeasibilityReport report;
    for (std::size_t j = 0; j < capacities.size(); ++j)
        if (load[j] > capacities[j])
        {
            report.ok = false;
            report.overloads.push_back({static_cast<int>(j), load[j] - capacities[j]});
        }
    return report;
}

std::vector<ActivationSet> activation_sets(const ActivationVector& activation, int num_bs)
{
    std::vector<ActivationSet> sets(num_bs);
    for (int j = 0; j < num_bs; ++j)
    {
        sets[j].bs_index = j;
        sets[j].slot_index = activation.slot_index;
    }
    for (int k = 0; k < activation.num_ues(); ++k)
    {
        int j = activation.assignment[k];
        if (j == ActivationVector::kUnserved)
            continue;
        if (j < 0 || j >= num_bs)
            throw std::invalid_argument("activation refers to a BS index out of range");
        sets[j].members.push_back(k);
    }
    return sets;
}

AssociationMatrix association_matrix(const ActivationMatrix& activations, int num_bs)
{
    activations.validate();
    if (activations.columns.empty())
        throw std::invalid_argument("association matrix needs at least one slot");

    const int num_ues = activations.columns.front().num_ues();
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(num_ues, num_bs);
    for (const ActivationVector& col : activations.columns)
        for (int k = 0; k < num_ues; ++k)
        {
            int j = col.assignment[k];
            if (j == ActivationVector::kUnserved)
                continue;
            if (j < 0 || j >= num_bs)
                throw std::invalid_argument("activation refers to a BS index out of range");
            counts(k, j) += 1;
        }

    AssociationMatrix out;
    out.horizon = activations.num_slots();
    out.coefficients = counts.cast<double>() / static_cast<double>(out.horizon);
    return out;
}

std::string to_csv(const AssociationMatrix& matrix)
{
    std::string csv = "ue";
    for (Eigen::Index j = 0; j < matrix.coefficients.cols(); ++j)
        csv += ",bs_" + std::to_string(j + 1);
    csv += "\n";
    char buf[64];
    for (Eigen::Index k = 0; k < matrix.coefficients.rows(); ++k)
    {
        csv += std::to_string(k + 1);
        for (Eigen::Index j = 0; j < matrix.coefficients.cols(); ++j)
        {
            std::snprintf(buf, sizeof buf, ",%.17g", matrix.coefficients(k, j));
            csv += buf;
        }
        csv += "\n";
    }
    return csv;
}

} // namespace tfasim::assoc
