def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    cap = rng.randint(1, 3 * max_len)
    lines = [f"{n} {cap}"]
    for _ in range(n):
        lines.append(f"{rng.randint(1, 10)} {rng.randint(1, 10)}")
    return "\n".join(lines) + "\n"
