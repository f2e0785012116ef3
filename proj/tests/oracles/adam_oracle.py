# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The reqrnn Authors
"""Scalar Adam on L = theta^2 / 2 from theta = 1, lr 0.1, 200 steps."""
import torch

theta = torch.tensor([1.0], dtype=torch.float64, requires_grad=True)
opt = torch.optim.Adam([theta], lr=0.1, betas=(0.9, 0.999), eps=1e-8)
trace = {}
for step in range(1, 201):
    opt.zero_grad()
    (theta * theta / 2).sum().backward()
    opt.step()
    if step in (1, 2, 10, 200):
        trace[step] = theta.item()
for k, v in trace.items():
    print(k, repr(v))
