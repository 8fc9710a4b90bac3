#!/usr/bin/env python3
# Copyright 2026 The ragscope Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled evaluation fixture: 10 documents, one per scenario,
and one record per question type per document (70 records).

Gold answers are built from whole document sentences and every key point is
one of those sentences, so a verbatim judge scores the gold answers as fully
complete. Multi-document records pair a document with the next one of the
same language.
"""

import argparse
import json
from pathlib import Path

# Each document: 14 fact sentences in three sections. Sentence 12 carries a
# number and sentence 13 a date, for the comparison and timeline records.
# Every fact is (sentence, topic); the topic feeds the generated question.
DOCS = [
    {
        "id": "en-criminal-01", "language": "EN", "scenario": "criminal_judgment",
        "title": "judgment of the Ashton Clarksville Court",
        "meta": [["court", "Ashton Clarksville Court"], ["defendant", "J. Gonzalez"]],
        "sections": ["COURT AND PARTIES", "CASE STATEMENT", "JUDGMENT"],
        "facts": [
            ("The case was heard by the Ashton Clarksville Court with M. Gray as chief judge.", "chief judge"),
            ("The Ashton Clarksville Procuratorate brought the prosecution.", "prosecution"),
            ("The defendant J. Gonzalez was born on 15 June 1999 and worked as a senior tax inspector.", "defendant background"),
            ("The case was filed for investigation on 1 March 2023.", "case filing"),
            ("Detention measures were taken against the defendant on 5 March 2023.", "detention measures"),
            ("The defendant was placed in criminal detention on 10 March 2023.", "criminal detention"),
            ("The formal arrest of the defendant followed on 12 March 2023.", "arrest"),
            ("Between January 2022 and December 2022 the defendant approved falsified tax refunds for four local firms.", "falsified tax refunds"),
            ("Emails between the defendant and the firms were recovered from the tax office server.", "email evidence"),
            ("The firms paid the defendant a total of 86000 dollars in return.", "payments received"),
            ("The defense lawyer M. Smith of Clarksville Legal Associates argued that the defendant acted under pressure.", "defense argument"),
            ("The court found that the defendant abused a position of public trust.", "court finding"),
            ("The defendant was sentenced to 5 years of fixed-term imprisonment.", "sentence length"),
            ("The judgment was delivered on 15 May 2023.", "judgment date"),
        ],
        "unanswerable": ("who employed the defendant before 2020", "the defendant's employer before 2020"),
    },
    {
        "id": "en-annual-01", "language": "EN", "scenario": "annual_report",
        "title": "2019 annual report of Huaxia Entertainment Company",
        "meta": [["company", "Huaxia Entertainment Company"]],
        "sections": ["COMPANY SUMMARY", "FINANCIAL REPORT", "CORPORATE GOVERNANCE"],
        "facts": [
            ("Huaxia Entertainment Company operates cinemas and produces films in eleven provinces.", "business scope"),
            ("The company was listed on the Shenzhen stock exchange in 2011.", "listing"),
            ("The chairman of the board during 2019 was W. Zhang.", "chairman"),
            ("Operating revenue for 2019 reached 648 million yuan.", "operating revenue"),
            ("Net profit attributable to shareholders was 41 million yuan.", "net profit"),
            ("Box office income fell because two major releases were postponed.", "box office income"),
            ("The company cut its marketing budget by one fifth.", "marketing budget"),
            ("In March 2019 the company acquired the studio operator Silver Lantern Pictures.", "studio acquisition"),
            ("The acquisition added nine film sets to the company's production capacity.", "production capacity"),
            ("The board approved a share repurchase plan in August 2019.", "share repurchase"),
            ("The board held 9 meetings during the year.", "board meetings"),
            ("The company donated cinema equipment to rural schools in Gansu province.", "school donation"),
            ("The company employed 3120 staff at the end of 2019.", "staff number"),
            ("The annual report was approved by the board on 28 April 2020.", "report approval"),
        ],
        "unanswerable": ("what dividend the company plans to pay for 2023", "the 2023 dividend plan"),
    },
    {
        "id": "en-inpatient-01", "language": "EN", "scenario": "inpatient_record",
        "title": "inpatient record of patient L. Carter at Riverside General Hospital",
        "meta": [["patient", "L. Carter"], ["hospital", "Riverside General Hospital"]],
        "sections": ["PATIENT INFORMATION", "EXAMINATION AND DIAGNOSIS", "TREATMENT"],
        "facts": [
            ("The patient L. Carter is a 64 year old retired electrician.", "patient profile"),
            ("The patient was admitted to Riverside General Hospital through the emergency department.", "admission route"),
            ("The chief complaint was chest tightness and shortness of breath for three days.", "chief complaint"),
            ("The patient has a ten year history of high blood pressure.", "blood pressure history"),
            ("An electrocardiogram showed changes in the inferior leads.", "electrocardiogram"),
            ("Blood tests showed a raised troponin level.", "troponin"),
            ("Coronary angiography found a narrowing of the right coronary artery.", "angiography"),
            ("The attending physician diagnosed an acute inferior myocardial infarction.", "diagnosis"),
            ("A stent was placed in the right coronary artery on the day of admission.", "stent placement"),
            ("The patient received aspirin and clopidogrel after the procedure.", "antiplatelet drugs"),
            ("The patient was advised to stop smoking and follow a low salt diet.", "lifestyle advice"),
            ("Cardiac rehabilitation was arranged at the outpatient clinic.", "rehabilitation"),
            ("The hospital stay lasted 7 days.", "length of stay"),
            ("The patient was discharged on 19 October 2022.", "discharge date"),
        ],
        "unanswerable": ("what the patient's cholesterol level was in 2015", "the patient's cholesterol level in 2015"),
    },
    {
        "id": "en-civil-01", "language": "EN", "scenario": "civil_judgment",
        "title": "civil judgment of the Hamilton District Court in the supply contract dispute",
        "meta": [["court", "Hamilton District Court"]],
        "sections": ["PARTIES", "FACTS OF THE DISPUTE", "RULING"],
        "facts": [
            ("The plaintiff Northgate Steel sued the builder Easton Homes over unpaid invoices.", "parties"),
            ("The presiding judge of the Hamilton District Court was E. Fischer.", "presiding judge"),
            ("Northgate Steel was represented by R. Okoro of Hamilton Defense Partners.", "plaintiff lawyer"),
            ("The two companies signed a supply contract for reinforcing steel in June 2021.", "supply contract"),
            ("Northgate Steel delivered the steel in six shipments.", "deliveries"),
            ("Easton Homes claimed that two shipments failed the strength tests.", "quality claim"),
            ("An independent laboratory later confirmed that all shipments met the contract standard.", "laboratory report"),
            ("The contract required payment within 60 days of each delivery.", "payment terms"),
            ("Easton Homes paid only for the first three shipments.", "partial payment"),
            ("The court held that the quality claim had no basis.", "quality ruling"),
            ("The court ordered Easton Homes to pay the outstanding invoices.", "payment order"),
            ("Easton Homes must also pay interest at the statutory rate.", "interest"),
            ("The outstanding amount was 412000 dollars.", "outstanding amount"),
            ("The ruling was issued on 3 February 2023.", "ruling date"),
        ],
        "unanswerable": ("how many employees Easton Homes has", "the workforce of Easton Homes"),
    },
    {
        "id": "en-insurance-01", "language": "EN", "scenario": "insurance_claim",
        "title": "claim report of Bluewater Mutual Insurance for the warehouse fire",
        "meta": [["insurer", "Bluewater Mutual Insurance"]],
        "sections": ["POLICY", "INCIDENT", "SETTLEMENT"],
        "facts": [
            ("The policyholder Greenfield Logistics insured its Dockside warehouse with Bluewater Mutual Insurance.", "policyholder"),
            ("The property policy covered fire, flood and storm damage.", "policy coverage"),
            ("The policy carried a deductible of 25000 dollars.", "deductible"),
            ("A fire broke out in the warehouse loading bay at night.", "fire outbreak"),
            ("The fire service brought the fire under control within two hours.", "fire control"),
            ("Investigators traced the fire to a faulty battery charger.", "fire cause"),
            ("Stored furniture and packaging materials were destroyed.", "destroyed goods"),
            ("The loss adjuster K. Novak inspected the site two days later.", "loss adjuster"),
            ("The adjuster found that the sprinkler system had been serviced on schedule.", "sprinkler check"),
            ("The insurer accepted the claim in full after the inspection.", "claim decision"),
            ("Greenfield Logistics moved its stock to a temporary site during repairs.", "temporary site"),
            ("The insurer also paid the rent of the temporary site for three months.", "rent cover"),
            ("The settlement amount was 1350000 dollars.", "settlement amount"),
            ("The settlement was paid on 21 September 2022.", "settlement date"),
        ],
        "unanswerable": ("what premium Greenfield Logistics paid in 2018", "the 2018 premium"),
    },
    {
        "id": "en-outpatient-01", "language": "EN", "scenario": "outpatient_record",
        "title": "outpatient record of patient S. Okafor at Northside Clinic",
        "meta": [["patient", "S. Okafor"], ["clinic", "Northside Clinic"]],
        "sections": ["VISIT", "FINDINGS", "PLAN"],
        "facts": [
            ("The patient S. Okafor is a 29 year old software tester.", "patient profile"),
            ("The patient visited Northside Clinic with recurring headaches for one month.", "visit reason"),
            ("The headaches usually started in the afternoon and lasted several hours.", "headache pattern"),
            ("The patient reported long hours of screen work and poor sleep.", "work habits"),
            ("The neurological examination was normal.", "neurological examination"),
            ("Blood pressure was measured at 118 over 76.", "blood pressure"),
            ("An eye test showed mild short sight that had not been corrected.", "eye test"),
            ("The doctor diagnosed tension type headache.", "diagnosis"),
            ("The doctor prescribed ibuprofen for use on headache days only.", "prescription"),
            ("The patient was referred to an optician for glasses.", "optician referral"),
            ("The doctor advised regular breaks from the screen.", "screen breaks"),
            ("A sleep diary was requested before the next visit.", "sleep diary"),
            ("The follow up visit was set for 4 weeks later.", "follow up interval"),
            ("The visit took place on 6 April 2023.", "visit date"),
        ],
        "unanswerable": ("which medicines the patient took as a child", "the patient's childhood medicines"),
    },
    {
        "id": "cn-labor-01", "language": "CN", "scenario": "labor_arbitration",
        "title": "南山区劳动争议仲裁委员会裁决书",
        "meta": [["机构", "南山区劳动争议仲裁委员会"]],
        "sections": ["当事人", "争议事实", "裁决结果"],
        "facts": [
            ("申请人王芳原为星河电子公司的质检员。", "申请人身份"),
            ("被申请人星河电子公司位于南山区科技园。", "被申请人"),
            ("仲裁员为陈立新。", "仲裁员"),
            ("双方于2019年签订了三年期劳动合同。", "劳动合同"),
            ("公司在合同期内以业务调整为由解除了劳动合同。", "解除合同"),
            ("公司未提前三十天通知申请人。", "提前通知"),
            ("公司也未支付经济补偿金。", "经济补偿金"),
            ("申请人提交了工资流水和解除通知书作为证据。", "证据"),
            ("公司辩称申请人多次违反考勤制度。", "公司答辩"),
            ("公司未能提供考勤违规的书面记录。", "考勤记录"),
            ("仲裁委员会认定公司属于违法解除劳动合同。", "仲裁认定"),
            ("仲裁委员会裁决公司支付赔偿金。", "赔偿裁决"),
            ("赔偿金额为人民币86400元。", "赔偿金额"),
            ("裁决于2023年3月15日作出。", "裁决日期"),
        ],
        "unanswerable": ("申请人入职前的工作单位", "申请人入职前的工作单位"),
    },
    {
        "id": "cn-fund-01", "language": "CN", "scenario": "fund_report",
        "title": "华夏稳健成长基金2022年第四季度报告",
        "meta": [["基金", "华夏稳健成长基金"]],
        "sections": ["基金概况", "投资表现", "投资组合"],
        "facts": [
            ("华夏稳健成长基金是一只混合型开放式基金。", "基金类型"),
            ("基金经理为刘明远。", "基金经理"),
            ("基金托管人为招商银行。", "托管人"),
            ("本季度基金份额净值增长率为百分之三点二。", "净值增长"),
            ("同期业绩比较基准收益率为百分之一点八。", "基准收益"),
            ("基金在季度内提高了消费行业的配置比例。", "行业配置"),
            ("基金减持了部分新能源股票。", "减持操作"),
            ("前十大重仓股合计占基金资产净值的百分之四十一。", "重仓股"),
            ("债券投资以国债和政策性金融债为主。", "债券投资"),
            ("基金经理认为国内消费将逐步恢复。", "市场展望"),
            ("基金在报告期内未发生重大关联交易。", "关联交易"),
            ("基金管理人承诺以诚实信用原则管理基金资产。", "管理人承诺"),
            ("期末基金资产净值为人民币12亿元。", "资产净值"),
            ("本报告于2023年1月20日披露。", "披露日期"),
        ],
        "unanswerable": ("基金经理在2010年管理过哪些基金", "基金经理2010年管理的基金"),
    },
    {
        "id": "cn-surgery-01", "language": "CN", "scenario": "surgery_record",
        "title": "上海瑞金医院患者李娜的手术记录",
        "meta": [["患者", "李娜"], ["医院", "上海瑞金医院"]],
        "sections": ["患者信息", "手术经过", "术后情况"],
        "facts": [
            ("患者李娜为四十二岁女性教师。", "患者信息"),
            ("患者因右上腹反复疼痛两个月入院。", "入院原因"),
            ("超声检查提示胆囊多发结石。", "超声检查"),
            ("术前诊断为慢性胆囊炎伴胆囊结石。", "术前诊断"),
            ("主刀医生为周建华。", "主刀医生"),
            ("麻醉方式为全身麻醉。", "麻醉方式"),
            ("手术方式为腹腔镜胆囊切除术。", "手术方式"),
            ("术中见胆囊壁增厚并与周围组织轻度粘连。", "术中所见"),
            ("手术过程顺利，出血量约二十毫升。", "出血量"),
            ("切除的胆囊送病理检查。", "病理检查"),
            ("术后患者恢复良好，无发热。", "术后恢复"),
            ("医生建议患者术后一个月内低脂饮食。", "饮食建议"),
            ("手术时长为65分钟。", "手术时长"),
            ("手术于2023年5月8日进行。", "手术日期"),
        ],
        "unanswerable": ("患者的血型", "患者的血型"),
    },
    {
        "id": "cn-penalty-01", "language": "CN", "scenario": "administrative_penalty",
        "title": "东湖区市场监督管理局行政处罚决定书",
        "meta": [["机关", "东湖区市场监督管理局"]],
        "sections": ["当事人信息", "违法事实", "处罚决定"],
        "facts": [
            ("当事人为东湖区绿源食品有限公司。", "当事人"),
            ("该公司主要从事糕点的生产和销售。", "经营范围"),
            ("执法人员于例行检查中发现问题。", "检查发现"),
            ("该公司销售的月饼标签未标注生产日期。", "标签问题"),
            ("部分产品使用了超过保质期的原料。", "过期原料"),
            ("执法人员现场扣押了相关产品。", "扣押产品"),
            ("该公司负责人承认了上述违法事实。", "负责人承认"),
            ("该行为违反了食品安全相关法律的规定。", "违法依据"),
            ("市场监督管理局决定没收违法所得。", "没收违法所得"),
            ("市场监督管理局责令该公司停业整顿。", "停业整顿"),
            ("当事人可在六十日内申请行政复议。", "行政复议"),
            ("当事人逾期不缴纳罚款将被加处罚款。", "逾期罚款"),
            ("罚款金额为人民币50000元。", "罚款金额"),
            ("处罚决定于2022年11月2日作出。", "决定日期"),
        ],
        "unanswerable": ("该公司的注册资本", "该公司的注册资本"),
    },
]

# Sentence indices used by each record type; multi-document types also take
# indices from the partner document.
PLAN = {
    "FQ": ([0, 1, 2], []),
    "SQ": ([3, 4, 5, 6], []),
    "MRQ": ([7, 8, 9], []),
    "IIQ": ([10, 11], [10]),
    "NCQ": ([12, 11], [12]),
    "TSQ": ([13, 3], [13]),
}


def document_text(doc):
    facts = [f for f, _ in doc["facts"]]
    parts = [doc["title"].upper() if doc["language"] == "EN" else doc["title"]]
    for s, section in enumerate(doc["sections"]):
        block = facts[s * 5:(s + 1) * 5] if s < 2 else facts[10:]
        parts.append(section + "\n" + "\n".join(block))
    return "\n\n".join(parts)


def strip_end(sentence):
    return sentence.rstrip(".。")


def join(language, sentences):
    return ("" if language == "CN" else " ").join(sentences)


def question(code, doc, topics, partner=None, partner_topics=()):
    cn = doc["language"] == "CN"
    listed = "、".join(topics) if cn else ", ".join(topics[:-1]) + " and " + topics[-1] if len(topics) > 1 else topics[0]
    if code == "FQ":
        return f"在{doc['title']}中，{listed}分别是什么？" if cn else f"According to the {doc['title']}, what are the {listed}?"
    if code == "SQ":
        return f"请概括{doc['title']}中关于{listed}的内容。" if cn else f"Summarize the {listed} described in the {doc['title']}."
    if code == "MRQ":
        return f"根据{doc['title']}，{listed}之间有什么联系？" if cn else f"Based on the {doc['title']}, how are the {listed} connected?"
    other = "、".join(partner_topics) if cn else " and ".join(partner_topics)
    if code == "IIQ":
        return (f"综合{doc['title']}中的{listed}以及{partner['title']}中的{other}，分别是什么情况？" if cn
                else f"Combining the {doc['title']} and the {partner['title']}, what are the {listed} of the first and the {other} of the second?")
    if code == "NCQ":
        return (f"比较{doc['title']}中的{topics[0]}与{partner['title']}中的{other}，并说明{topics[1]}。" if cn
                else f"Compare the {topics[0]} in the {doc['title']} with the {other} in the {partner['title']}, and state the {topics[1]}.")
    if code == "TSQ":
        return (f"{doc['title']}中的{topics[0]}和{partner['title']}中的{other}哪个更早？另外{topics[1]}是什么时候？" if cn
                else f"Which came first, the {topics[0]} in the {doc['title']} or the {other} in the {partner['title']}, and when was the {topics[1]}?")
    raise ValueError(code)


def unanswerable(doc):
    ask, thing = doc["unanswerable"]
    if doc["language"] == "CN":
        q = f"根据{doc['title']}，{ask}是什么？"
        answer = [f"{doc['title']}没有提供足够的信息来回答这个问题。", f"文中没有记载{thing}。", "现有内容无法推断出答案。"]
    else:
        q = f"According to the {doc['title']}, {ask}?"
        answer = [f"The {doc['title']} does not provide sufficient information to answer this question.",
                  f"It does not mention {thing}.", "Nothing in the record allows the answer to be inferred."]
    return q, answer


def build():
    lines = []
    for doc in DOCS:
        lines.append({"kind": "document", "id": doc["id"], "language": doc["language"],
                      "scenario": doc["scenario"], "meta": dict(doc["meta"]),
                      "text": document_text(doc)})
    for i, doc in enumerate(DOCS):
        same = [d for d in DOCS if d["language"] == doc["language"]]
        partner = same[(same.index(doc) + 1) % len(same)]
        for code in ["FQ", "SQ", "MRQ", "IIQ", "NCQ", "TSQ", "UQ"]:
            rid = f"{doc['id']}-{code}"
            if code == "UQ":
                q, answer = unanswerable(doc)
                lines.append({"kind": "record", "id": rid, "language": doc["language"], "question": q,
                              "question_type": code, "document_ids": [doc["id"]], "references": [],
                              "answer": join(doc["language"], answer),
                              "keypoints": [strip_end(s) for s in answer]})
                continue
            own, other = PLAN[code]
            picked = [(doc, doc["facts"][k]) for k in own] + [(partner, partner["facts"][k]) for k in other]
            topics = [doc["facts"][k][1] for k in own]
            partner_topics = [partner["facts"][k][1] for k in other]
            q = question(code, doc, topics, partner, partner_topics)
            sentences = [fact[0] for _, fact in picked]
            refs = [{"source_document_id": d["id"], "text": fact[0]} for d, fact in picked]
            lines.append({"kind": "record", "id": rid, "language": doc["language"], "question": q,
                          "question_type": code,
                          "document_ids": [doc["id"]] + ([partner["id"]] if other else []),
                          "references": refs, "answer": join(doc["language"], sentences),
                          "keypoints": [strip_end(s) for s in sentences]})
    return lines


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parent.parent / "data/fixtures/eval_fixture.jsonl")
    args = parser.parse_args()
    lines = build()
    with args.out.open("w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps(line, ensure_ascii=False, separators=(",", ":")) + "\n")
    print(f"wrote {sum(l['kind'] == 'document' for l in lines)} documents and "
          f"{sum(l['kind'] == 'record' for l in lines)} records to {args.out}")


if __name__ == "__main__":
    main()
