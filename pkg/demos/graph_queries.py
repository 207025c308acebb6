"""
Asking the plant graph questions
================================

Merged lines and symbols form a bipartite graph. Routes, loops and
reachable equipment all come from that graph.
"""

from pid_linker import SynthSpec, detect_cycles, digitize, find_route, generate, reachable_set
from pid_linker.graph import format_route, to_dot

scene, _ = generate(SynthSpec(seed=21, n_symbols=14, n_lines=16, tee_prob=0.4))
g = digitize(scene).graph
print(len(g.symbols), "symbols,", len(g.lines), "lines,", len(g.attachments), "contacts")

# Who talks to whom, one hop away through a shared line.
for s in list(g.symbols)[:5]:
    neighbours = ", ".join(f"S{t} via L{l}" for t, l in sorted(g.derived_adjacency[s]))
    print(f"S{s} ({g.symbols[s]}): {neighbours or 'nothing'}")

# Fewest-hop route between two symbols in the same component.
first = min(g.symbols)
reach = sorted(reachable_set(g, first))
print("\nreachable from", f"S{first}:", reach)
print("route:", format_route(find_route(g, first, reach[-1])))

# Independent loops in the piping.
cycles = detect_cycles(g)
print(f"\n{len(cycles)} independent cycles")
for c in cycles:
    print("  " + " ".join(map(str, c)))

# DOT text for graphviz, if it is around.
print()
print(to_dot(g, scene.sheet_id)[:300] + "...")
