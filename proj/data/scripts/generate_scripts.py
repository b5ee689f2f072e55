import json

def rap(): return {"name": "Random Access Preamble", "kind": "RAP", "size_bits": 0, "delay_after": "RAP->DCI"}
def dci(nxt): return {"name": "DCI", "kind": "DCI_RX", "size_bits": 0, "delay_after": nxt}
def ul(name, bits, delay, **kw): d = {"name": name, "kind": "UL_DATA", "size_bits": bits, "delay_after": delay}; d.update(kw); return d
def dl(name, bits, delay): return {"name": name, "kind": "DL_DATA", "size_bits": bits, "delay_after": delay}
def ack(name, bits, delay): return {"name": name, "kind": "ACK_UL", "size_bits": bits, "delay_after": delay}

def connection_setup(t):
    rar, req, setup, comp = t
    return [rap(), dci("DCI->RAR"), dl("Random Access Response", rar, "RAR->RRC_REQUEST"),
            ul("RRC Connection Request", req, "RRC_REQUEST->DCI"), dci("DCI->RRC_SETUP"),
            dl("RRC Connection Setup", setup, "RRC_SETUP->DCI"), dci("DCI->RRC_SETUP_COMPLETE"),
            ul("RRC Connection Complete", comp, "RRC_SETUP_COMPLETE->DCI")]

def exchange(msgs):
    """msgs: list of (direction, name, bits). Each is preceded by a DCI."""
    steps = []
    for i, (d, name, bits) in enumerate(msgs):
        steps.append(dci("DCI->DATA_TX" if d == "ul" else "DCI->DATA_RX"))
        nxt = "" if i == len(msgs) - 1 else ("DATA_TX->DCI" if d == "ul" else "DATA_RX->DCI")
        steps.append((ul if d == "ul" else dl)(name, bits, nxt))
    return steps

def chain(*parts):
    out = []
    for p in parts:
        if out and out[-1]["delay_after"] == "":
            out[-1]["delay_after"] = "DATA_TX->DCI" if out[-1]["kind"] == "UL_DATA" else "DATA_RX->DCI"
        out += p
    return out

def release(bits):
    return [dci("DCI->S1_RELEASE"), dl("RRC Release", bits, "RELEASE->ACK"), ack("ACK", 32, "")]

def resume(bits):
    return [dci("DCI->DATA_RX"), dl("RRC Resume", bits, "RESUME->ACK"), ack("ACK", 32, "")]

def finish(steps):
    for s in steps:
        if s["delay_after"] == "":
            del s["delay_after"]
    return steps

setup = {"nbiot": (104, 88, 144, 424), "ltem": (56, 72, 336, 656)}
scripts = {}

scripts["nbiot"] = {
    "attach": chain(connection_setup(setup["nbiot"]), exchange([
        ("ul", "Attach Request", 256), ("dl", "Identity Request", 96), ("ul", "Identity Response", 176),
        ("dl", "Authentication Request", 432), ("ul", "Authentication Response", 264),
        ("dl", "Security Command", 328), ("ul", "Security Complete", 240),
        ("dl", "Attach Accept + UE Enquiry", 1080), ("ul", "UE Capability", 128),
        ("ul", "Attach Complete", 240), ("dl", "EMM Info", 488)])),
    "service_request": chain(connection_setup(setup["nbiot"]),
        [dci("DCI->DATA_TX"), ul("Service Request + UL data", 56, "DATA_TX->DCI", carries_payload=True),
         dci("DCI->SERVICE_ACCEPT"), dl("Service Accept", 176, "SERVICE_ACCEPT->DCI"),
         dci("DCI->DATA_TX"), ack("Service Accept ACK", 32, "DATA_TX->DCI"),
         dci("DCI->DATA_RX"), dl("RRC Reconfiguration", 72, "DATA_RX->DCI"),
         dci("DCI->DATA_TX"), ul("RRC Reconfiguration Complete", 16, "")]),
    "release": release(72),
    "resume": resume(72),
    "tau": chain(connection_setup(setup["nbiot"]), exchange([
        ("ul", "TAU Request", 144), ("dl", "TAU Accept", 448), ("ul", "TAU Complete", 80)]), release(72)),
}
scripts["ltem"] = {
    "attach": chain(connection_setup(setup["ltem"]), exchange([
        ("ul", "Attach Request", 768), ("dl", "Identity Request", 40), ("ul", "Identity Response", 128),
        ("dl", "Authentication Request", 312), ("ul", "Authentication Response", 112),
        ("dl", "Security Command", 232), ("ul", "Security Complete", 176),
        ("dl", "Attach Accept", 792), ("dl", "UE Enquiry", 208), ("ul", "UE Capability", 256),
        ("ul", "Attach Complete", 256), ("dl", "EMM Info", 408)])),
    "service_request": chain(connection_setup(setup["ltem"]),
        [{"name": "Scheduling Request", "kind": "ACK_UL", "size_bits": 0, "delay_after": "SR->DCI", "scheduling_request": True},
         dci("DCI->DATA_TX"), ul("UL data", 0, "", carries_payload=True)]),
    "release": release(96),
    "resume": resume(96),
    "tau": chain(connection_setup(setup["ltem"]), exchange([
        ("ul", "TAU Request", 224), ("dl", "TAU Accept", 512), ("ul", "TAU Complete", 112)]), release(96)),
}
# The connection-setup chain links RRC Connection Complete into the next DCI.
for tech, d in scripts.items():
    for name, steps in d.items():
        for i, s in enumerate(steps):
            if s["delay_after"] == "" and i != len(steps) - 1:
                raise SystemExit(f"dangling delay in {tech}/{name} step {i}")
        doc = {"name": name, "technology": "NBIOT" if tech == "nbiot" else "LTEM", "steps": finish(steps)}
        with open(f"scripts/{tech}/{name}.json", "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
        ul_t = sum(s["size_bits"] for s in steps if s["kind"] in ("UL_DATA", "ACK_UL"))
        dl_t = sum(s["size_bits"] for s in steps if s["kind"] == "DL_DATA")
        print(tech, name, ul_t, dl_t)
