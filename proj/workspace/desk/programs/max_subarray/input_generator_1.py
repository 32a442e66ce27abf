def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    a = [rng.randint(-10, 10) for _ in range(n)]
    return f"{n}\n{' '.join(map(str, a))}\n"
